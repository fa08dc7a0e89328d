"""Judge quality against human ground truth.

Binary classification metrics (positive class = PASS), Student-t confidence
intervals over per-run F1, per-category strata, cost accounting, and the
cost-versus-F1 Pareto frontier. All functions are pure over immutable
inputs and safe to call concurrently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from statistics import stdev

from scipy.stats import t as student_t

from .errors import (
    DuplicateModelIdError,
    EmptyMatrixError,
    InsufficientRunsError,
    MissingTruthError,
    SchemaError,
    UnknownLeafIdError,
)
from .rubric import Rubric, ScoreReport, TaskCategory, Verdict, propagate_scores
from .verdicts import LeafVerdict


class AbstentionHandling(str, Enum):
    AS_FAIL = "as_fail"
    EXCLUDE = "exclude"


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruthEntry:
    verdict: Verdict
    grader_id: str
    notes: str = ""
    timestamp: str = ""


@dataclass(frozen=True)
class GroundTruth:
    """Human pass/fail labels keyed by (trajectory_id, leaf_id)."""

    entries: dict[tuple[str, str], TruthEntry] = field(default_factory=dict)

    def get(self, trajectory_id: str, leaf_id: str) -> TruthEntry | None:
        return self.entries.get((trajectory_id, leaf_id))

    @property
    def trajectory_ids(self) -> list[str]:
        return sorted({t for t, _ in self.entries})


def ground_truth_from_docs(docs) -> GroundTruth:
    """Build a GroundTruth from one or more per-trajectory documents."""
    if isinstance(docs, dict):
        docs = [docs]
    entries: dict[tuple[str, str], TruthEntry] = {}
    for doc in docs:
        if not isinstance(doc, dict) or "trajectory_id" not in doc:
            raise SchemaError("ground-truth document must carry a trajectory_id")
        traj_id = doc["trajectory_id"]
        for i, raw in enumerate(doc.get("entries", [])):
            path = f"$.entries[{i}]"
            if not isinstance(raw, dict) or "leaf_id" not in raw or "verdict" not in raw:
                raise SchemaError("entry needs leaf_id and verdict", path=path)
            key = (traj_id, raw["leaf_id"])
            if key in entries:
                raise SchemaError(
                    f"duplicate label for trajectory {traj_id!r} leaf {raw['leaf_id']!r}",
                    path=path,
                )
            entries[key] = TruthEntry(
                verdict=Verdict.from_any(raw["verdict"]),
                grader_id=str(raw.get("grader_id", "")),
                notes=str(raw.get("notes", "")),
                timestamp=str(raw.get("timestamp", "")),
            )
    return GroundTruth(entries=entries)


def ground_truth_to_docs(truth: GroundTruth) -> list[dict]:
    by_traj: dict[str, list[dict]] = {}
    for (traj_id, leaf_id), entry in sorted(truth.entries.items()):
        by_traj.setdefault(traj_id, []).append(
            {
                "leaf_id": leaf_id,
                "verdict": entry.verdict.value,
                "grader_id": entry.grader_id,
                "notes": entry.notes,
                "timestamp": entry.timestamp,
            }
        )
    return [
        {"trajectory_id": traj_id, "entries": entries}
        for traj_id, entries in sorted(by_traj.items())
    ]


def load_ground_truth(path) -> GroundTruth:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return ground_truth_from_docs(doc)


# ---------------------------------------------------------------------------
# Confusion and point metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


@dataclass(frozen=True)
class BinaryMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float


def confusion(
    verdicts: list[LeafVerdict],
    truth: GroundTruth,
    abstention_handling: AbstentionHandling = AbstentionHandling.AS_FAIL,
) -> ConfusionMatrix:
    """Count (trajectory, leaf, run) judgments against truth. Positive = PASS."""
    tp = fp = fn = tn = 0
    missing: list[tuple[str, str]] = []
    for v in verdicts:
        if v.abstained and abstention_handling is AbstentionHandling.EXCLUDE:
            continue
        label = truth.get(v.trajectory_id, v.leaf_id)
        if label is None:
            missing.append((v.trajectory_id, v.leaf_id))
            continue
        predicted_pass = v.verdict is Verdict.PASS
        actual_pass = label.verdict is Verdict.PASS
        if predicted_pass and actual_pass:
            tp += 1
        elif predicted_pass and not actual_pass:
            fp += 1
        elif not predicted_pass and actual_pass:
            fn += 1
        else:
            tn += 1
    if missing:
        raise MissingTruthError(
            f"{len(missing)} verdict(s) lack ground truth: {sorted(set(missing))[:10]}"
        )
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def binary_metrics(cm: ConfusionMatrix) -> BinaryMetrics:
    """Accuracy/precision/recall/F1; zero-denominator terms defined as 0."""
    if cm.total == 0:
        raise EmptyMatrixError("confusion matrix is empty")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return BinaryMetrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1)


def macro_f1(cm: ConfusionMatrix) -> float:
    """Mean of the PASS-class and FAIL-class F1 scores."""
    pass_f1 = binary_metrics(cm).f1
    fail_f1 = binary_metrics(
        ConfusionMatrix(tp=cm.tn, fp=cm.fn, fn=cm.fp, tn=cm.tp)
    ).f1
    return (pass_f1 + fail_f1) / 2


# ---------------------------------------------------------------------------
# Consistency across runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfidenceInterval:
    mean: float
    std_error: float
    ci_halfwidth_95: float
    n: int


def f1_confidence(per_run_values: list[float]) -> ConfidenceInterval:
    """Student-t 95% halfwidth over a per-run metric series (needs >= 2 runs)."""
    n = len(per_run_values)
    if n < 2:
        raise InsufficientRunsError("confidence interval needs at least 2 runs")
    mean = sum(per_run_values) / n
    std_error = stdev(per_run_values) / n ** 0.5
    halfwidth = float(student_t.ppf(0.975, n - 1)) * std_error
    return ConfidenceInterval(mean=mean, std_error=std_error, ci_halfwidth_95=halfwidth, n=n)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    f1_ci_halfwidth: float | None
    n_runs: int
    per_run_f1: list[float]
    abstention_rate: float
    matrix: ConfusionMatrix


@dataclass(frozen=True)
class StratifiedReport:
    overall: MetricsReport
    by_category: dict[TaskCategory, MetricsReport]


def judge_report(
    verdicts: list[LeafVerdict],
    truth: GroundTruth,
    abstention_handling: AbstentionHandling = AbstentionHandling.AS_FAIL,
    f1_average: str = "micro",
) -> MetricsReport:
    """Metrics over all judgments, with per-run F1 for the CI.

    F1 is micro-averaged over (trajectory, leaf, run) judgments by default;
    pass f1_average="macro" for the mean of per-class F1s instead.
    """
    if f1_average not in ("micro", "macro"):
        raise ValueError("f1_average must be 'micro' or 'macro'")
    if not verdicts:
        raise EmptyMatrixError("no verdicts to grade")
    pooled = confusion(verdicts, truth, abstention_handling)
    overall = binary_metrics(pooled)
    pick_f1 = (lambda cm: macro_f1(cm)) if f1_average == "macro" else (
        lambda cm: binary_metrics(cm).f1
    )

    run_indices = sorted({v.run_index for v in verdicts})
    per_run_f1: list[float] = []
    for run in run_indices:
        run_verdicts = [v for v in verdicts if v.run_index == run]
        cm = confusion(run_verdicts, truth, abstention_handling)
        per_run_f1.append(pick_f1(cm) if cm.total else 0.0)

    halfwidth = None
    if len(per_run_f1) >= 2:
        halfwidth = f1_confidence(per_run_f1).ci_halfwidth_95

    abstained = sum(1 for v in verdicts if v.abstained)
    return MetricsReport(
        accuracy=overall.accuracy,
        precision=overall.precision,
        recall=overall.recall,
        f1=pick_f1(pooled),
        f1_ci_halfwidth=halfwidth,
        n_runs=len(run_indices),
        per_run_f1=per_run_f1,
        abstention_rate=abstained / len(verdicts),
        matrix=pooled,
    )


def stratify(
    verdicts: list[LeafVerdict],
    truth: GroundTruth,
    rubric: Rubric,
    abstention_handling: AbstentionHandling = AbstentionHandling.AS_FAIL,
) -> StratifiedReport:
    """Partition judgments by the rubric leaf's category and grade each stratum.

    Category always comes from the rubric, never from the verdict record.
    Categories with no judgments are absent from the result rather than
    reported as zero.
    """
    category_of: dict[str, TaskCategory] = {}
    for leaf in rubric.leaf_ids:
        node = rubric.leaf(leaf)
        assert node.category is not None  # enforced at parse time
        category_of[leaf] = node.category

    buckets: dict[TaskCategory, list[LeafVerdict]] = {}
    for v in verdicts:
        if v.leaf_id not in category_of:
            raise UnknownLeafIdError(
                f"verdict references leaf {v.leaf_id!r} not present in rubric "
                f"{rubric.name!r}"
            )
        buckets.setdefault(category_of[v.leaf_id], []).append(v)

    by_category = {
        cat: judge_report(members, truth, abstention_handling)
        for cat, members in buckets.items()
    }
    return StratifiedReport(
        overall=judge_report(verdicts, truth, abstention_handling),
        by_category=by_category,
    )


# ---------------------------------------------------------------------------
# Cost
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostReport:
    mean_cost_per_trajectory: Decimal
    ci_halfwidth: float | None
    per_run_mean_cost: list[Decimal]
    per_trajectory_cost: dict[str, Decimal]
    human_cost_usd: Decimal | None


def cost_report(
    verdicts: list[LeafVerdict],
    human_hourly_rate_usd: Decimal | None = None,
    human_hours: Decimal | None = None,
) -> CostReport:
    """Mean judging cost per trajectory, CI across runs, and a human benchmark.

    Cost of one (trajectory, run) is the sum of its leaf-session costs; the
    per-run series feeding the CI is each run's mean cost per trajectory.
    """
    by_traj_run: dict[tuple[str, int], Decimal] = {}
    for v in verdicts:
        key = (v.trajectory_id, v.run_index)
        by_traj_run[key] = by_traj_run.get(key, Decimal("0")) + v.cost_usd

    runs = sorted({run for _, run in by_traj_run})
    per_run_mean: list[Decimal] = []
    for run in runs:
        costs = [c for (t, r), c in by_traj_run.items() if r == run]
        per_run_mean.append(sum(costs) / len(costs))

    traj_ids = sorted({t for t, _ in by_traj_run})
    per_traj: dict[str, Decimal] = {}
    for traj in traj_ids:
        costs = [c for (t, r), c in by_traj_run.items() if t == traj]
        per_traj[traj] = sum(costs) / len(costs)

    mean = (
        sum(per_run_mean) / len(per_run_mean) if per_run_mean else Decimal("0")
    )
    halfwidth = None
    if len(per_run_mean) >= 2:
        halfwidth = f1_confidence([float(c) for c in per_run_mean]).ci_halfwidth_95

    human_cost = None
    if human_hourly_rate_usd is not None and human_hours is not None:
        human_cost = Decimal(human_hourly_rate_usd) * Decimal(human_hours)

    return CostReport(
        mean_cost_per_trajectory=mean,
        ci_halfwidth=halfwidth,
        per_run_mean_cost=per_run_mean,
        per_trajectory_cost=per_traj,
        human_cost_usd=human_cost,
    )


# ---------------------------------------------------------------------------
# Pareto frontier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoPoint:
    model_id: str
    f1: float
    mean_cost_usd_per_trajectory: float
    on_frontier: bool


def pareto_frontier(
    points: list[tuple[str, float, float]],
    baseline_f1_filter: float | None = None,
) -> list[ParetoPoint]:
    """Flag every (model, f1, cost) point as on or off the frontier.

    A point is dominated iff some other point has f1 >= its f1 and cost <=
    its cost with at least one inequality strict. Points at or below the
    baseline filter are excluded from the frontier outright. Output is
    sorted by cost ascending (ties: f1 descending, then model id) and is
    independent of input order.
    """
    seen: set[str] = set()
    for model_id, f1, cost in points:
        if model_id in seen:
            raise DuplicateModelIdError(f"duplicate model id {model_id!r}")
        seen.add(model_id)
        if cost <= 0:
            raise ValueError(f"{model_id}: cost must be > 0")
        if not 0.0 <= f1 <= 1.0:
            raise ValueError(f"{model_id}: f1 must be within [0, 1]")

    candidates = [
        p for p in points
        if baseline_f1_filter is None or p[1] > baseline_f1_filter
    ]

    def dominated(p) -> bool:
        _, pf, pc = p
        for q in candidates:
            if q is p:
                continue
            _, qf, qc = q
            if qf >= pf and qc <= pc and (qf > pf or qc < pc):
                return True
        return False

    frontier_ids = {p[0] for p in candidates if not dominated(p)}
    ordered = sorted(points, key=lambda p: (p[2], -p[1], p[0]))
    return [
        ParetoPoint(
            model_id=model_id,
            f1=f1,
            mean_cost_usd_per_trajectory=cost,
            on_frontier=model_id in frontier_ids,
        )
        for model_id, f1, cost in ordered
    ]


# ---------------------------------------------------------------------------
# Composite scores
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryComposite:
    per_run: dict[int, float]
    mean: float
    low: float
    high: float


@dataclass(frozen=True)
class CompositeSummary:
    per_trajectory: dict[str, TrajectoryComposite]
    mean: float


def composite_scores(verdicts: list[LeafVerdict], rubric: Rubric) -> CompositeSummary:
    """Propagate each run's verdicts up the rubric; summarize composites."""
    grouped: dict[tuple[str, int], dict[str, Verdict]] = {}
    for v in verdicts:
        grouped.setdefault((v.trajectory_id, v.run_index), {})[v.leaf_id] = v.verdict

    composites: dict[str, dict[int, float]] = {}
    for (traj_id, run), verdict_map in sorted(grouped.items()):
        report: ScoreReport = propagate_scores(rubric, verdict_map)
        composites.setdefault(traj_id, {})[run] = report.composite

    per_trajectory: dict[str, TrajectoryComposite] = {}
    all_values: list[float] = []
    for traj_id, by_run in composites.items():
        values = list(by_run.values())
        all_values.extend(values)
        per_trajectory[traj_id] = TrajectoryComposite(
            per_run=by_run,
            mean=sum(values) / len(values),
            low=min(values),
            high=max(values),
        )
    return CompositeSummary(
        per_trajectory=per_trajectory,
        mean=sum(all_values) / len(all_values) if all_values else 0.0,
    )
