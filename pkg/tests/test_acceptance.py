"""Acceptance suite: one test per release criterion, one printed line each.

Every criterion runs against the mock or random providers only; nothing
here needs a live model endpoint.
"""

import json
import random
import time
from contextlib import contextmanager
from decimal import Decimal

import pytest

from trajudge.judge import (
    JudgeBudget,
    ProviderConfig,
    ScriptedProvider,
    judge_trajectory,
    parse_script,
    random_judge,
)
from trajudge.metrics import (
    ConfusionMatrix,
    GroundTruth,
    TruthEntry,
    binary_metrics,
    confusion,
    f1_confidence,
    judge_report,
    pareto_frontier,
    stratify,
)
from trajudge.rubric import (
    Verdict,
    leaf_nodes,
    parse_rubric,
    propagate_scores,
    serialize_rubric,
)
from trajudge.trajectory import SearchField, load_trajectory, serialize_trajectory
from trajudge.truthstore import TruthStore
from trajudge.verdicts import LeafVerdict, Usage

from .conftest import (
    naive_substring_scan,
    random_rubric_doc,
    random_verdicts,
    rational_all_scores,
)
from .test_metrics import TABLE_POINTS


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number}: FAIL - {description}")
        raise
    print(f"[acceptance] criterion {number}: PASS - {description}")


# ---------------------------------------------------------------------------
# 1. Propagation oracle
# ---------------------------------------------------------------------------

def test_criterion_1_propagation_oracle():
    with criterion(1, "propagate_scores matches rational oracle on 1000 random rubrics"):
        started = time.perf_counter()
        rng = random.Random(0xACCE)
        for _ in range(1000):
            rubric = parse_rubric(random_rubric_doc(rng, max_depth=5, max_branch=4))
            verdicts = random_verdicts(rng, rubric)
            report = propagate_scores(rubric, verdicts)
            expected = rational_all_scores(rubric.root, verdicts)
            for node_id, fraction in expected.items():
                assert abs(report.per_node[node_id] - float(fraction)) < 1e-12
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 2. Random-judge baseline
# ---------------------------------------------------------------------------

def test_criterion_2_random_judge_baseline(sample_rubric):
    with criterion(2, "random judge mean F1 in [0.45, 0.55] vs balanced truth"):
        started = time.perf_counter()
        trajectory_ids = ["traj-a", "traj-b", "traj-c"]
        leaf_ids = sample_rubric.leaf_ids
        entries = {}
        flip = True
        for traj in trajectory_ids:
            for leaf in leaf_ids:
                entries[(traj, leaf)] = TruthEntry(
                    verdict=Verdict.PASS if flip else Verdict.FAIL, grader_id="g"
                )
                flip = not flip
        truth = GroundTruth(entries=entries)
        assert (
            sum(1 for e in truth.entries.values() if e.verdict is Verdict.PASS) == 18
        )

        f1s = []
        for seed in range(1000):
            verdicts = []
            for traj in trajectory_ids:
                _, batch = random_judge(sample_rubric, traj, rng_seed=f"{seed}:{traj}")
                verdicts.extend(batch)
            f1s.append(binary_metrics(confusion(verdicts, truth)).f1)
        mean_f1 = sum(f1s) / len(f1s)
        assert 0.45 <= mean_f1 <= 0.55, f"mean F1 {mean_f1:.4f}"
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 3. Pareto reproduction
# ---------------------------------------------------------------------------

def test_criterion_3_pareto_reproduction():
    with criterion(3, "published 13-model frontier reproduced with and without baseline"):
        started = time.perf_counter()
        filtered = pareto_frontier(TABLE_POINTS, baseline_f1_filter=0.49)
        frontier = {p.model_id for p in filtered if p.on_frontier}
        assert frontier == {
            "gemini-2.5-flash-lite",
            "claude-3-5-haiku-20241022",
            "kimi-k2-instruct",
            "claude-3-7-sonnet-20250219",
        }
        unfiltered = {p.model_id for p in pareto_frontier(TABLE_POINTS) if p.on_frontier}
        assert unfiltered == frontier | {"o3-mini-2025-01-31"}
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 4. Metrics closed form
# ---------------------------------------------------------------------------

def test_criterion_4_metrics_closed_form():
    with criterion(4, "closed-form confusion metrics and degenerate conventions"):
        m = binary_metrics(ConfusionMatrix(tp=5, fp=1, fn=2, tn=4))
        assert m.accuracy == pytest.approx(0.75, abs=1e-4)
        assert m.precision == pytest.approx(0.8333, abs=1e-4)
        assert m.recall == pytest.approx(0.7143, abs=1e-4)
        assert m.f1 == pytest.approx(0.7692, abs=1e-4)

        degenerate = binary_metrics(ConfusionMatrix(tp=0, fp=0, fn=0, tn=10))
        assert degenerate.precision == 0.0
        assert degenerate.recall == 0.0
        assert degenerate.f1 == 0.0
        assert degenerate.accuracy == 1.0


# ---------------------------------------------------------------------------
# 5. Consistency machinery
# ---------------------------------------------------------------------------

def test_criterion_5_consistency_machinery(sample_rubric):
    with criterion(5, "Student-t CI over per-run F1; five-run scaffolding"):
        two = f1_confidence([0.7, 0.8])
        assert two.ci_halfwidth_95 == pytest.approx(0.6353, abs=1e-3)
        assert f1_confidence([0.8] * 5).ci_halfwidth_95 == 0.0

        # five runs through the harness produce five per-run F1s for the CI
        script = parse_script(
            [
                {
                    "tool_calls": [
                        {
                            "name": "submit_verdict",
                            "arguments": {"verdict": "pass", "justification": "ok"},
                        }
                    ]
                }
            ]
        )
        trajectory = load_trajectory(
            {
                "trajectory_id": "t5",
                "metadata": {},
                "system_prompt": "",
                "user_prompt": "",
                "tool_definitions": [],
                "calls": [],
            }
        )
        verdicts = judge_trajectory(
            sample_rubric, trajectory, ScriptedProvider(script), runs=5
        )
        truth = GroundTruth(
            entries={
                ("t5", leaf): TruthEntry(
                    verdict=Verdict.PASS if i % 2 == 0 else Verdict.FAIL, grader_id="g"
                )
                for i, leaf in enumerate(sample_rubric.leaf_ids)
            }
        )
        report = judge_report(verdicts, truth)
        assert report.n_runs == 5
        assert len(report.per_run_f1) == 5
        assert report.f1_ci_halfwidth == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# 6. Harness integration
# ---------------------------------------------------------------------------

def synthetic_trajectory(n_calls=150):
    calls = []
    for i in range(n_calls):
        token = ["recon", "exploit", "lateral", "persist"][i % 4]
        response = f"{token} output {i}"
        if i % 17 == 0:
            response += " vagrant"
        if i in (3, 40, 41):
            response += " NTLM"
        calls.append(
            {
                "call_id": f"c{i}",
                "tool_name": "run_command",
                "arguments": {"command": f"{token}-step-{i}"},
                "response": response,
            }
        )
    return load_trajectory(
        {
            "trajectory_id": "synthetic-150",
            "metadata": {},
            "system_prompt": "sys",
            "user_prompt": "usr",
            "tool_definitions": [
                {"name": "run_command", "description": "", "parameters": {}}
            ],
            "calls": calls,
        }
    )


def stable_fields(v: LeafVerdict):
    return (
        v.trajectory_id, v.leaf_id, v.verdict, v.justification, v.abstained,
        v.usage, v.cost_usd, v.run_index, v.session_id,
    )


def test_criterion_6_harness_integration(sample_rubric):
    with criterion(6, "scripted judge over 150-call trajectory: dispatch, memory, budget, cost"):
        started = time.perf_counter()
        trajectory = synthetic_trajectory(150)
        leaf_ids = sample_rubric.leaf_ids

        queries = {leaf: ["vagrant", "NTLM"][i % 2] for i, leaf in enumerate(leaf_ids)}
        script = parse_script(
            {
                "leaves": {
                    leaf: [
                        {"tool_calls": [{"name": "search_trajectory",
                                         "arguments": {"query": queries[leaf],
                                                       "scope": ["response"]}}]},
                        {"tool_calls": [{"name": "get_tool_call",
                                         "arguments": {"index": 3}}]},
                        {"tool_calls": [{"name": "store_memory",
                                         "arguments": {"text": f"note-{leaf}"}}]},
                        {"tool_calls": [{"name": "list_memories", "arguments": {}}]},
                        {"tool_calls": [{"name": "submit_verdict",
                                         "arguments": {"verdict": "pass" if i % 3 else "fail",
                                                       "justification": f"checked {queries[leaf]}"}}]},
                    ]
                    for i, leaf in enumerate(leaf_ids)
                }
            }
        )
        config = ProviderConfig(
            provider_id="mock",
            model_name="scripted",
            price_per_million_input_tokens=Decimal("2.50"),
            price_per_million_output_tokens=Decimal("10.00"),
        )
        provider = ScriptedProvider(script, config=config)

        sessions = []
        verdicts = judge_trajectory(
            sample_rubric,
            trajectory,
            provider,
            runs=1,
            concurrency_limit=8,
            collect_sessions=sessions,
        )

        # all 12 leaves completed, none abstained
        assert len(verdicts) == 12
        assert all(not v.abstained for v in verdicts)
        assert {v.leaf_id for v in verdicts} == set(leaf_ids)

        # transcripts show correct tool dispatch; search results equal oracle
        by_leaf = {s.leaf.id: s for s in sessions}
        for leaf in leaf_ids:
            session = by_leaf[leaf]
            tool_results = [m for m in session.transcript if m["role"] == "tool"]
            assert len(tool_results) == 5
            search_payload = json.loads(tool_results[0]["content"])
            oracle = naive_substring_scan(
                trajectory, queries[leaf], scope={SearchField.RESPONSE}
            )
            oracle_counts = [
                {"call_index": idx, "count": count} for idx, _, count in oracle
            ]
            got_counts = [
                {"call_index": h["call_index"], "count": h["match_count_in_record"]}
                for h in search_payload["hits"]
            ]
            assert search_payload["total_matches"] == len(oracle_counts)
            assert got_counts == oracle_counts[: len(got_counts)]
            # memory round-trip: list_memories shows the stored note
            assert f"note-{leaf}" in tool_results[3]["content"]
            assert session.memories == [f"note-{leaf}"]

        # cost recomputation from tokens x prices is exact
        for v in verdicts:
            recomputed = (
                v.usage.input_tokens * config.price_per_million_input_tokens
                + v.usage.output_tokens * config.price_per_million_output_tokens
            ) / Decimal(10**6)
            assert v.cost_usd == recomputed

        # budget exhaustion: abstained FAIL after max_iterations + 1 turns
        stall = ScriptedProvider(parse_script([{"content": "still reading"}]), config=config)
        budget = JudgeBudget(max_iterations=4)
        stalled = judge_trajectory(
            sample_rubric, trajectory, stall, runs=1, budget=budget
        )
        assert all(v.abstained for v in stalled)
        assert all(v.verdict is Verdict.FAIL for v in stalled)
        assert all(v.usage.iterations == 5 for v in stalled)

        # deterministic across concurrency limits 1 and 8
        serial = judge_trajectory(
            sample_rubric, trajectory, provider, runs=1, concurrency_limit=1
        )
        assert [stable_fields(v) for v in serial] == [stable_fields(v) for v in verdicts]

        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 7. Stratification
# ---------------------------------------------------------------------------

def test_criterion_7_stratification(sample_rubric):
    with criterion(7, "stratum confusion matrices sum to overall on 100 random fixtures"):
        rng = random.Random(0x57A7)
        category_of = {
            leaf.id: leaf.category for leaf in leaf_nodes(sample_rubric)
        }
        for _ in range(100):
            labels = {leaf: rng.choice(["pass", "fail"]) for leaf in sample_rubric.leaf_ids}
            truth = GroundTruth(
                entries={
                    ("t", leaf): TruthEntry(verdict=Verdict.from_any(v), grader_id="g")
                    for leaf, v in labels.items()
                }
            )
            verdicts = [
                LeafVerdict(
                    trajectory_id="t",
                    leaf_id=leaf,
                    verdict=Verdict.from_any(rng.choice(["pass", "fail"])),
                    justification="x",
                    usage=Usage(),
                    run_index=rng.choice([0, 1]),
                )
                for leaf in sample_rubric.leaf_ids
                for _ in range(rng.choice([1, 2]))
            ]
            report = stratify(verdicts, truth, sample_rubric)
            summed = ConfusionMatrix()
            for r in report.by_category.values():
                summed = summed + r.matrix
            assert summed == report.overall.matrix
            # category partition always mirrors the rubric's leaf categories
            for cat, r in report.by_category.items():
                expected = sum(
                    1 for v in verdicts if category_of[v.leaf_id] is cat
                )
                assert r.matrix.total == expected


# ---------------------------------------------------------------------------
# 8. Format round-trips
# ---------------------------------------------------------------------------

def test_criterion_8_format_round_trips(
    sample_rubric, sample_trajectory, sample_rubric_path, sample_trajectory_path, tmp_path
):
    with criterion(8, "canonical JSON round-trips and truth export last-write-wins"):
        rubric_text = sample_rubric_path.read_text(encoding="utf-8")
        assert serialize_rubric(parse_rubric(rubric_text)) == rubric_text

        traj_text = sample_trajectory_path.read_text(encoding="utf-8")
        assert serialize_trajectory(load_trajectory(traj_text)) == traj_text

        store = TruthStore(tmp_path / "truth.json")
        rng = random.Random(808)
        reference = {}
        for _ in range(250):
            leaf = rng.choice(sample_rubric.leaf_ids)
            verdict = rng.choice(["pass", "fail"])
            store.put("pentest-run-1", leaf, verdict, grader_id=f"g{rng.randint(1, 3)}")
            reference[leaf] = verdict
        exported = store.trajectory_doc("pentest-run-1")
        assert {
            e["leaf_id"]: e["verdict"] for e in exported["entries"]
        } == reference
