"""Drive judge sessions: one isolated session per rubric leaf.

The loop: send the transcript, receive a model turn, dispatch any judge
tool calls against the trajectory or session memory, append results, and
repeat until the model submits a verdict or the budget runs out. On
exhaustion the judge gets one final mandatory-verdict request; a session
that still refuses is recorded as an abstention (conservative FAIL).
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor

from ..rubric import Rubric, RubricNode, Verdict, leaf_nodes
from ..trajectory import Trajectory
from ..verdicts import LeafVerdict, Usage
from .prompts import build_judge_prompt
from .providers import ChatCompletionProvider, ToolCallRequest
from .session import (
    JUDGE_TOOL_SCHEMAS,
    SUBMIT_VERDICT_SCHEMA,
    JudgeBudget,
    JudgeSession,
    JudgeToolCall,
    SessionState,
    ToolLimits,
    compress_context,
    dispatch_judge_tool,
)

ABSTAIN_JUSTIFICATION = "session exhausted its budget without submitting a verdict"


def _wire_tool_call(tc: ToolCallRequest) -> dict:
    return {
        "id": tc.call_id,
        "type": "function",
        "function": {"name": tc.name, "arguments": tc.arguments_raw},
    }


def _parse_verdict_args(raw: str) -> tuple[Verdict, str] | str:
    """Validate submit_verdict arguments; an error string means malformed."""
    try:
        args = json.loads(raw)
    except json.JSONDecodeError as exc:
        return f"error: submit_verdict arguments are not valid JSON: {exc}"
    if not isinstance(args, dict):
        return "error: submit_verdict arguments must be an object"
    try:
        verdict = Verdict.from_any(args.get("verdict"))
    except ValueError:
        return 'error: submit_verdict requires "verdict" of "pass" or "fail"'
    justification = str(args.get("justification", "")).strip()
    if not justification:
        return "error: submit_verdict requires a non-empty justification"
    return verdict, justification


def run_leaf_session(
    leaf: RubricNode,
    trajectory: Trajectory,
    provider: ChatCompletionProvider,
    budget: JudgeBudget | None = None,
    rubric: Rubric | None = None,
    templates=None,
    limits: ToolLimits = ToolLimits(),
    run_index: int = 0,
    session_id: str | None = None,
) -> tuple[LeafVerdict, JudgeSession]:
    """Judge one leaf and return both the verdict and the full session."""
    budget = budget or JudgeBudget()
    system, user = build_judge_prompt(leaf, rubric=rubric, templates=templates)
    session = JudgeSession(
        session_id=session_id or f"{trajectory.trajectory_id}:{leaf.id}:r{run_index}",
        leaf=leaf,
        trajectory_id=trajectory.trajectory_id,
        category_prompt=system,
        budget=budget,
        transcript=[
            {"role": "system", "content": system},
            {"role": "user", "content": user},
        ],
    )
    provider_session = provider.start_session(leaf.id)
    started = time.monotonic()

    verdict: Verdict | None = None
    justification = ""

    def take_turn(tools: list[dict]) -> None:
        nonlocal verdict, justification
        messages, elided = compress_context(
            session.transcript, session.memories, budget.effective_compress_threshold
        )
        if elided:
            session.transcript[:] = messages
            session.elided_exchanges += elided
        turn = provider_session.complete(session.transcript, tools)
        session.usage = session.usage + Usage(
            input_tokens=turn.input_tokens,
            output_tokens=turn.output_tokens,
            iterations=1,
        )
        assistant: dict = {"role": "assistant", "content": turn.content}
        if turn.tool_calls:
            assistant["tool_calls"] = [_wire_tool_call(tc) for tc in turn.tool_calls]
        session.transcript.append(assistant)

        if not turn.tool_calls:
            session.transcript.append(
                {
                    "role": "user",
                    "content": (
                        "Reminder: investigate with the provided tools and finish "
                        "by calling submit_verdict."
                    ),
                }
            )
            return

        for tc in turn.tool_calls:
            if tc.name == "submit_verdict":
                parsed = _parse_verdict_args(tc.arguments_raw)
                if isinstance(parsed, str):
                    result = parsed  # malformed: report back, keep going
                else:
                    verdict, justification = parsed
                    result = "verdict recorded"
            else:
                arg_error = None
                try:
                    arguments = json.loads(tc.arguments_raw) if tc.arguments_raw else {}
                    if not isinstance(arguments, dict):
                        arg_error = "error: tool arguments must be a JSON object"
                except json.JSONDecodeError as exc:
                    arg_error = f"error: tool arguments are not valid JSON: {exc}"
                if arg_error:
                    result = arg_error
                else:
                    result = dispatch_judge_tool(
                        session, trajectory, JudgeToolCall(tc.name, arguments), limits
                    )
            session.transcript.append(
                {"role": "tool", "tool_call_id": tc.call_id, "content": result}
            )
            if verdict is not None:
                break

    while (
        verdict is None
        and session.usage.iterations < budget.max_iterations
        and session.usage.input_tokens + session.usage.output_tokens
        < budget.max_total_tokens
    ):
        take_turn(JUDGE_TOOL_SCHEMAS)

    abstained = False
    if verdict is None:
        # One mandatory-verdict request beyond the budget, then give up.
        session.transcript.append(
            {
                "role": "user",
                "content": (
                    "Your investigation budget is exhausted. You must now call "
                    "submit_verdict with your best-evidence pass or fail verdict."
                ),
            }
        )
        take_turn([SUBMIT_VERDICT_SCHEMA])
        if verdict is None:
            abstained = True
            verdict = Verdict.FAIL
            justification = ABSTAIN_JUSTIFICATION

    session.state = SessionState.ABSTAINED if abstained else SessionState.COMPLETED
    leaf_verdict = LeafVerdict(
        trajectory_id=trajectory.trajectory_id,
        leaf_id=leaf.id,
        verdict=verdict,
        justification=justification,
        abstained=abstained,
        usage=session.usage,
        cost_usd=provider.config.cost_for(session.usage),
        wall_time_s=time.monotonic() - started,
        run_index=run_index,
        session_id=session.session_id,
        provider_id=provider.config.provider_id,
    )
    return leaf_verdict, session


def run_leaf_judgment(
    leaf: RubricNode,
    trajectory: Trajectory,
    provider: ChatCompletionProvider,
    budget: JudgeBudget | None = None,
    **kwargs,
) -> LeafVerdict:
    verdict, _ = run_leaf_session(leaf, trajectory, provider, budget=budget, **kwargs)
    return verdict


def judge_trajectory(
    rubric: Rubric,
    trajectory: Trajectory,
    provider: ChatCompletionProvider,
    runs: int = 1,
    concurrency_limit: int = 4,
    budget: JudgeBudget | None = None,
    templates=None,
    limits: ToolLimits = ToolLimits(),
    collect_sessions: list | None = None,
) -> list[LeafVerdict]:
    """Judge every leaf, ``runs`` times, with bounded parallelism.

    Output order is deterministic (run index, then leaf document order)
    regardless of completion order. A leaf session that errors out yields an
    abstained FAIL verdict rather than aborting the batch.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    leaves = leaf_nodes(rubric)
    tasks = [(run, pos) for run in range(runs) for pos in range(len(leaves))]

    def work(run: int, pos: int):
        leaf = leaves[pos]
        try:
            return run_leaf_session(
                leaf,
                trajectory,
                provider,
                budget=budget,
                rubric=rubric,
                templates=templates,
                limits=limits,
                run_index=run,
            )
        except Exception as exc:
            failed = LeafVerdict(
                trajectory_id=trajectory.trajectory_id,
                leaf_id=leaf.id,
                verdict=Verdict.FAIL,
                justification=f"session error: {exc}",
                abstained=True,
                run_index=run,
                session_id=f"{trajectory.trajectory_id}:{leaf.id}:r{run}",
                provider_id=provider.config.provider_id,
            )
            return failed, None

    results: dict[tuple[int, int], tuple] = {}
    max_workers = max(1, concurrency_limit)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {
            pool.submit(work, run, pos): (run, pos) for run, pos in tasks
        }
        for future, key in futures.items():
            results[key] = future.result()

    verdicts: list[LeafVerdict] = []
    for key in sorted(results):
        verdict, sess = results[key]
        verdicts.append(verdict)
        if collect_sessions is not None and sess is not None:
            collect_sessions.append(sess)
    return verdicts


def random_judge(
    rubric: Rubric,
    trajectory_id: str,
    rng_seed: int,
    run_index: int = 0,
) -> tuple[dict[str, Verdict], list[LeafVerdict]]:
    """Baseline judge: an independent fair coin flip per leaf, zero cost."""
    rng = random.Random(rng_seed)
    verdict_map: dict[str, Verdict] = {}
    verdicts: list[LeafVerdict] = []
    for leaf in leaf_nodes(rubric):
        verdict = Verdict.PASS if rng.random() < 0.5 else Verdict.FAIL
        verdict_map[leaf.id] = verdict
        verdicts.append(
            LeafVerdict(
                trajectory_id=trajectory_id,
                leaf_id=leaf.id,
                verdict=verdict,
                justification=f"random baseline verdict (seed {rng_seed})",
                abstained=False,
                usage=Usage(),
                run_index=run_index,
                session_id=f"{trajectory_id}:{leaf.id}:r{run_index}",
                provider_id="random",
            )
        )
    return verdict_map, verdicts
