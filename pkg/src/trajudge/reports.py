"""Report rendering: machine JSON, aligned text tables, and Pareto CSV."""

from __future__ import annotations

import csv
import io

from .metrics import (
    CompositeSummary,
    CostReport,
    MetricsReport,
    ParetoPoint,
    StratifiedReport,
)


def metrics_report_to_dict(report: MetricsReport) -> dict:
    return {
        "accuracy": round(report.accuracy, 4),
        "precision": round(report.precision, 4),
        "recall": round(report.recall, 4),
        "f1": round(report.f1, 4),
        "f1_ci_halfwidth_95": (
            round(report.f1_ci_halfwidth, 4) if report.f1_ci_halfwidth is not None else None
        ),
        "n_runs": report.n_runs,
        "per_run_f1": [round(x, 4) for x in report.per_run_f1],
        "abstention_rate": round(report.abstention_rate, 4),
        "confusion": {
            "tp": report.matrix.tp,
            "fp": report.matrix.fp,
            "fn": report.matrix.fn,
            "tn": report.matrix.tn,
        },
    }


def stratified_report_to_dict(report: StratifiedReport) -> dict:
    return {
        "overall": metrics_report_to_dict(report.overall),
        "by_category": {
            cat.value: metrics_report_to_dict(r) for cat, r in report.by_category.items()
        },
    }


def composite_summary_to_dict(summary: CompositeSummary) -> dict:
    return {
        "mean": round(summary.mean, 4),
        "per_trajectory": {
            traj: {
                "mean": round(tc.mean, 4),
                "low": round(tc.low, 4),
                "high": round(tc.high, 4),
                "per_run": {str(r): round(v, 4) for r, v in sorted(tc.per_run.items())},
            }
            for traj, tc in sorted(summary.per_trajectory.items())
        },
    }


def cost_report_to_dict(report: CostReport) -> dict:
    return {
        "mean_cost_per_trajectory_usd": str(report.mean_cost_per_trajectory),
        "ci_halfwidth_95": (
            round(report.ci_halfwidth, 4) if report.ci_halfwidth is not None else None
        ),
        "per_run_mean_cost_usd": [str(c) for c in report.per_run_mean_cost],
        "per_trajectory_cost_usd": {
            t: str(c) for t, c in sorted(report.per_trajectory_cost.items())
        },
        "human_cost_usd": (
            str(report.human_cost_usd) if report.human_cost_usd is not None else None
        ),
    }


def _fmt(value, ci=None) -> str:
    if value is None:
        return "-"
    text = f"{value:.2f}"
    if ci is not None:
        text += f" ± {ci:.2f}"
    return text


def render_metrics_table(rows: list[tuple[str, MetricsReport]]) -> str:
    """Aligned text table, one row per labelled report."""
    header = ["Label", "Accuracy", "Precision", "Recall", "F1", "Abstain"]
    table = [header]
    for label, r in rows:
        table.append(
            [
                label,
                _fmt(r.accuracy),
                _fmt(r.precision),
                _fmt(r.recall),
                _fmt(r.f1, r.f1_ci_halfwidth),
                _fmt(r.abstention_rate),
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for n, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(header))))
    return "\n".join(lines)


def render_stratified_table(report: StratifiedReport) -> str:
    rows = [("overall", report.overall)]
    rows += sorted(
        ((cat.value, r) for cat, r in report.by_category.items()), key=lambda x: x[0]
    )
    return render_metrics_table(rows)


def render_pareto_table(points: list[ParetoPoint]) -> str:
    header = ["Model", "F1", "Cost (USD)", "Frontier"]
    table = [header]
    for p in points:
        table.append(
            [
                p.model_id,
                f"{p.f1:.2f}",
                f"{p.mean_cost_usd_per_trajectory:.2f}",
                "yes" if p.on_frontier else "",
            ]
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for n, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(header))))
    return "\n".join(lines)


def pareto_points_to_csv(points: list[ParetoPoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["model_id", "f1", "mean_cost_usd_per_trajectory", "on_frontier"])
    for p in points:
        writer.writerow(
            [p.model_id, p.f1, p.mean_cost_usd_per_trajectory, str(p.on_frontier).lower()]
        )
    return buffer.getvalue()


def read_pareto_csv(text: str) -> list[tuple[str, float, float]]:
    """Parse (model, f1, cost) rows; raises ValueError with the line number."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise ValueError("empty CSV")
    start = 0
    if rows[0] and rows[0][0].strip().lower() in ("model", "model_id"):
        start = 1
    points = []
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if len(row) < 3:
            raise ValueError(f"line {line_no}: expected model,f1,cost")
        try:
            points.append((row[0].strip(), float(row[1]), float(row[2])))
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from exc
    return points
