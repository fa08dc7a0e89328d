"""Command-line entry points for the judging pipeline.

Subcommands: validate, lint, judge, grade, stratify, pareto, cost, serve.
Exit codes are a stable contract for CI pipelines: 0 success, 1 validation
failure, 2 runtime/provider failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path

from .config import AppConfig, load_config
from .errors import ProviderError, RunExistsError, TrajudgeError
from .judge import (
    HttpChatProvider,
    ScriptedProvider,
    judge_trajectory,
    load_script,
    random_judge,
)
from .metrics import (
    AbstentionHandling,
    composite_scores,
    cost_report,
    judge_report,
    load_ground_truth,
    pareto_frontier,
    stratify,
)
from .reports import (
    composite_summary_to_dict,
    cost_report_to_dict,
    metrics_report_to_dict,
    pareto_points_to_csv,
    read_pareto_csv,
    render_metrics_table,
    render_pareto_table,
    render_stratified_table,
    stratified_report_to_dict,
)
from .rubric import canonical_json, lint_rubric, load_rubric
from .trajectory import load_trajectory_file, stats
from .verdicts import read_verdicts_jsonl, write_verdicts_jsonl

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _load_app_config(args) -> AppConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return AppConfig()


def _trajectory_paths(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(p.glob("*.traj.json")))
        else:
            out.append(p)
    return out


def _emit(args, payload: dict, table: str) -> None:
    if getattr(args, "format", "table") == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(table)


# ---------------------------------------------------------------------------
# validate / lint
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    status = EXIT_OK
    try:
        rubric = load_rubric(args.rubric)
    except TrajudgeError as exc:
        print(f"{args.rubric}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"{args.rubric}: rubric ok ({len(rubric.leaf_ids)} leaves)")
    for warning in lint_rubric(rubric):
        print(f"{args.rubric}: warning {warning.code} [{warning.node_id}]: {warning.message}")

    for path in _trajectory_paths(args.trajectories):
        try:
            traj = load_trajectory_file(path)
        except (TrajudgeError, OSError) as exc:
            code = getattr(exc, "code", "IO_ERROR")
            print(f"{path}: {code}: {exc}", file=sys.stderr)
            status = EXIT_VALIDATION
            continue
        summary = stats(traj)
        print(f"{path}: trajectory ok ({summary.calls} calls, {summary.distinct_tools} tools)")
        for warning in traj.ingest_warnings:
            print(f"{path}: warning INGEST: {warning}")
    return status


def cmd_lint(args) -> int:
    try:
        rubric = load_rubric(args.rubric)
    except TrajudgeError as exc:
        print(f"{args.rubric}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    warnings = lint_rubric(rubric, min_words=args.min_words)
    for warning in warnings:
        print(f"{warning.code} [{warning.node_id}]: {warning.message}")
    if not warnings:
        print("no lint warnings")
    return EXIT_OK


# ---------------------------------------------------------------------------
# judge
# ---------------------------------------------------------------------------

def _resolve_provider(spec: str, config: AppConfig):
    """'random:<seed>' | 'mock:<script.json>' | a provider_id from the config."""
    if spec.startswith("random:"):
        return ("random", int(spec.split(":", 1)[1]))
    if spec.startswith("mock:"):
        script = load_script(spec.split(":", 1)[1])
        return ("provider", ScriptedProvider(script))
    if spec == "mock":
        raise TrajudgeError("mock provider needs a script: --provider mock:<script.json>")
    if spec in config.providers:
        return ("provider", HttpChatProvider(config.providers[spec]))
    raise TrajudgeError(
        f"unknown provider {spec!r}; expected random:<seed>, mock:<script.json>, "
        f"or one of {sorted(config.providers)}"
    )


def cmd_judge(args) -> int:
    config = _load_app_config(args)
    rubric = load_rubric(args.rubric)
    paths = _trajectory_paths(args.trajectories)
    if not paths:
        print("no trajectories given", file=sys.stderr)
        return EXIT_VALIDATION

    run_id = args.run_id or datetime.now(timezone.utc).strftime("run-%Y%m%dT%H%M%SZ")
    run_dir = Path(args.output_dir) / run_id
    if run_dir.exists() and not args.force:
        raise RunExistsError(
            f"run directory {run_dir} already exists; pass --force to overwrite"
        )
    run_dir.mkdir(parents=True, exist_ok=True)

    kind, provider = _resolve_provider(args.provider, config)
    all_verdicts = []
    warning_count = 0
    for path in paths:
        trajectory = load_trajectory_file(path)
        warning_count += len(trajectory.ingest_warnings)
        if kind == "random":
            base_seed = provider
            for run in range(args.runs):
                _, verdicts = random_judge(
                    rubric,
                    trajectory.trajectory_id,
                    rng_seed=f"{base_seed}:{trajectory.trajectory_id}:{run}",
                    run_index=run,
                )
                all_verdicts.extend(verdicts)
        else:
            all_verdicts.extend(
                judge_trajectory(
                    rubric,
                    trajectory,
                    provider,
                    runs=args.runs,
                    concurrency_limit=args.concurrency,
                    budget=config.budget,
                    templates=config.category_templates,
                    limits=config.limits,
                )
            )

    write_verdicts_jsonl(run_dir / "verdicts.jsonl", all_verdicts)
    manifest = {
        "run_id": run_id,
        "rubric_path": str(args.rubric),
        "trajectory_paths": [str(p) for p in paths],
        "provider": args.provider,
        "runs": args.runs,
        "concurrency_limit": args.concurrency,
        "output_dir": str(args.output_dir),
        "created_at": _utc_now(),
    }
    (run_dir / "manifest.json").write_text(canonical_json(manifest), encoding="utf-8")

    abstained = sum(1 for v in all_verdicts if v.abstained)
    total_cost = sum((v.cost_usd for v in all_verdicts), Decimal("0"))
    summary = {
        "run_id": run_id,
        "trajectories": len(paths),
        "leaves": len(rubric.leaf_ids),
        "runs": args.runs,
        "verdicts": len(all_verdicts),
        "abstained": abstained,
        "total_cost_usd": str(total_cost),
        "ingest_warnings": warning_count,
    }
    (run_dir / "summary.json").write_text(canonical_json(summary), encoding="utf-8")
    print(f"wrote {run_dir}/verdicts.jsonl ({len(all_verdicts)} verdicts, {abstained} abstained)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# grade / stratify / cost
# ---------------------------------------------------------------------------

def _load_grading_inputs(args):
    verdicts = read_verdicts_jsonl(args.verdicts)
    truth = load_ground_truth(args.truth)
    rubric = load_rubric(args.rubric) if getattr(args, "rubric", None) else None
    handling = AbstentionHandling(args.abstentions)
    return verdicts, truth, rubric, handling


def cmd_grade(args) -> int:
    verdicts, truth, rubric, handling = _load_grading_inputs(args)
    overall = judge_report(verdicts, truth, handling)
    payload = {"overall": metrics_report_to_dict(overall)}
    tables = [render_metrics_table([("overall", overall)])]

    if rubric is not None:
        stratified = stratify(verdicts, truth, rubric, handling)
        payload["stratified"] = stratified_report_to_dict(stratified)
        tables = [render_stratified_table(stratified)]
        runs_complete = {v.run_index for v in verdicts}
        full_coverage = all(
            {v.leaf_id for v in verdicts if v.run_index == run} == set(rubric.leaf_ids)
            for run in runs_complete
        )
        if full_coverage:
            composites = composite_scores(verdicts, rubric)
            payload["composite_scores"] = composite_summary_to_dict(composites)
            tables.append(
                "composite mean: "
                + " ".join(
                    f"{traj}={tc.mean:.4f}"
                    for traj, tc in sorted(composites.per_trajectory.items())
                )
            )

    if args.output_dir:
        out_dir = Path(args.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "grade-report.json").write_text(
            canonical_json(payload), encoding="utf-8"
        )
    _emit(args, payload, "\n\n".join(tables))
    return EXIT_OK


def cmd_stratify(args) -> int:
    verdicts, truth, rubric, handling = _load_grading_inputs(args)
    stratified = stratify(verdicts, truth, rubric, handling)
    _emit(args, stratified_report_to_dict(stratified), render_stratified_table(stratified))
    return EXIT_OK


def cmd_cost(args) -> int:
    verdicts = read_verdicts_jsonl(args.verdicts)
    rate = Decimal(args.human_rate) if args.human_rate else None
    hours = Decimal(args.human_hours) if args.human_hours else None
    report = cost_report(verdicts, human_hourly_rate_usd=rate, human_hours=hours)
    payload = cost_report_to_dict(report)
    lines = [f"mean cost per trajectory: ${report.mean_cost_per_trajectory:.4f}"]
    if report.ci_halfwidth is not None:
        lines[0] += f" ± {report.ci_halfwidth:.4f}"
    if report.human_cost_usd is not None:
        lines.append(f"human benchmark: ${report.human_cost_usd:.2f}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# pareto
# ---------------------------------------------------------------------------

def cmd_pareto(args) -> int:
    try:
        points = read_pareto_csv(Path(args.input).read_text(encoding="utf-8"))
    except ValueError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    flagged = pareto_frontier(points, baseline_f1_filter=args.baseline)
    if args.output:
        Path(args.output).write_text(pareto_points_to_csv(flagged), encoding="utf-8")
    payload = {
        "points": [
            {
                "model_id": p.model_id,
                "f1": p.f1,
                "mean_cost_usd_per_trajectory": p.mean_cost_usd_per_trajectory,
                "on_frontier": p.on_frontier,
            }
            for p in flagged
        ]
    }
    _emit(args, payload, render_pareto_table(flagged))
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------

def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    config = _load_app_config(args)
    app = build_app(
        rubric_path=args.rubric,
        corpus=args.corpus,
        truth_path=args.truth,
        frontend_dir=args.frontend,
    )
    port = args.port or config.service_port
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trajudge",
        description="Judge recorded agent trajectories against hierarchical rubrics",
    )
    parser.add_argument("--config", help="config file (providers, budgets, templates)")
    parser.add_argument(
        "--format", choices=["json", "table"], default="table", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a rubric and trajectories")
    p.add_argument("--rubric", required=True)
    p.add_argument("trajectories", nargs="*", help="trajectory files or directories")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("lint", help="authoring warnings for a rubric")
    p.add_argument("--rubric", required=True)
    p.add_argument("--min-words", type=int, default=8)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("judge", help="run judge sessions over trajectories")
    p.add_argument("--rubric", required=True)
    p.add_argument("--trajectories", nargs="+", required=True)
    p.add_argument(
        "--provider",
        required=True,
        help="provider id from config, mock:<script.json>, or random:<seed>",
    )
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--concurrency", type=int, default=4)
    p.add_argument("--run-id", default=None)
    p.add_argument("--output-dir", default="runs")
    p.add_argument("--force", action="store_true", help="overwrite an existing run dir")
    p.set_defaults(func=cmd_judge)

    p = sub.add_parser("grade", help="compare verdicts to ground truth")
    p.add_argument("--verdicts", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--rubric", help="enables strata and composite scores")
    p.add_argument("--abstentions", choices=["as_fail", "exclude"], default="as_fail")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("stratify", help="per-category metrics only")
    p.add_argument("--verdicts", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--rubric", required=True)
    p.add_argument("--abstentions", choices=["as_fail", "exclude"], default="as_fail")
    p.set_defaults(func=cmd_stratify)

    p = sub.add_parser("pareto", help="cost/F1 frontier from a CSV of models")
    p.add_argument("--input", required=True, help="CSV of model_id,f1,cost rows")
    p.add_argument("--baseline", type=float, default=None,
                   help="exclude points with f1 <= this from the frontier")
    p.add_argument("--output", default=None, help="write flagged points CSV here")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("cost", help="judging cost report from verdicts")
    p.add_argument("--verdicts", required=True)
    p.add_argument("--human-rate", default=None, help="human hourly rate in USD")
    p.add_argument("--human-hours", default=None, help="human hours per trajectory")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("serve", help="HTTP API for browsing and human grading")
    p.add_argument("--rubric", required=True)
    p.add_argument("--corpus", required=True, help="trajectory file or directory")
    p.add_argument("--truth", required=True, help="ground-truth store file (created if absent)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--frontend", default=None, help="static bundle directory to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProviderError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except TrajudgeError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"IO_ERROR: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
