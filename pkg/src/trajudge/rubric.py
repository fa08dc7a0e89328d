"""Hierarchical pass/fail rubrics: parsing, validation, scoring, lint.

A rubric is a tree of weighted requirements. Leaves are binary criteria
(each carries a task category); internal nodes aggregate their children as
a weighted average. Rubric values are immutable after parsing and safe to
share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import yaml

from .errors import (
    MissingVerdictError,
    RubricValidationError,
    SchemaError,
    UnknownLeafError,
)

SCORE_TOLERANCE = 1e-12


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"

    @property
    def value_as_score(self) -> float:
        return 1.0 if self is Verdict.PASS else 0.0

    @classmethod
    def from_any(cls, value) -> "Verdict":
        """Accept the enum, its serialized token, a bool, or 0/1."""
        if isinstance(value, Verdict):
            return value
        if isinstance(value, bool):
            return cls.PASS if value else cls.FAIL
        if isinstance(value, (int, float)) and value in (0, 1):
            return cls.PASS if value == 1 else cls.FAIL
        if isinstance(value, str):
            token = value.strip().lower()
            if token in ("pass", "1", "true"):
                return cls.PASS
            if token in ("fail", "0", "false"):
                return cls.FAIL
        raise ValueError(f"not a verdict: {value!r}")


class TaskCategory(str, Enum):
    OPERATIONAL_OBJECTIVE = "operational_objective"
    OPERATIONAL_SECURITY = "operational_security"
    TRADECRAFT = "tradecraft"


@dataclass(frozen=True)
class RubricNode:
    id: str
    requirement: str
    weight: int = 1
    category: TaskCategory | None = None
    children: tuple["RubricNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Rubric:
    name: str
    version: str
    root: RubricNode
    metadata: dict[str, str] = field(default_factory=dict)

    def leaf(self, leaf_id: str) -> RubricNode:
        for node in leaf_nodes(self):
            if node.id == leaf_id:
                return node
        raise UnknownLeafError(f"no leaf with id {leaf_id!r}")

    @property
    def leaf_ids(self) -> list[str]:
        return [node.id for node in leaf_nodes(self)]


@dataclass(frozen=True)
class ScoreReport:
    """Per-node scores after propagating leaf verdicts up the tree."""

    per_node: dict[str, float]
    composite: float


@dataclass(frozen=True)
class LintWarning:
    code: str  # TOO_SHORT | VAGUE_TERM | DUPLICATE_REQUIREMENT
    node_id: str
    message: str


DEFAULT_VAGUE_TERMS = ("enough", "appropriate", "reasonable")
DEFAULT_MIN_REQUIREMENT_WORDS = 8

_CATEGORY_TOKENS = {c.value for c in TaskCategory}
_NODE_KEYS = {"id", "requirement", "weight", "category", "children"}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_rubric(document: str | dict) -> Rubric:
    """Parse and validate a rubric document (JSON/YAML text or a mapping).

    Raises SchemaError for malformed documents (with the path of the
    offending field) and RubricValidationError for semantic violations
    (category on an internal node, duplicate ids, weight < 1, empty
    requirement).
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = yaml.safe_load(document)  # YAML is a superset of JSON
        except yaml.YAMLError as exc:
            raise SchemaError(f"unparseable document: {exc}") from exc
    else:
        doc = document

    if not isinstance(doc, dict):
        raise SchemaError("rubric document must be an object")
    for key in ("name", "version", "root"):
        if key not in doc:
            raise SchemaError(f"missing required field {key!r}")
    if not isinstance(doc["name"], str):
        raise SchemaError("must be a string", path="$.name")
    if not isinstance(doc["version"], str):
        raise SchemaError("must be a string", path="$.version")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise SchemaError("must be a string-to-string map", path="$.metadata")

    root = _parse_node(doc["root"], "$.root")
    rubric = Rubric(
        name=doc["name"],
        version=doc["version"],
        root=root,
        metadata=dict(metadata),
    )
    _validate(rubric)
    return rubric


def _parse_node(raw, path: str) -> RubricNode:
    if not isinstance(raw, dict):
        raise SchemaError("node must be an object", path=path)
    unknown = set(raw) - _NODE_KEYS
    if unknown:
        raise SchemaError(f"unknown field(s): {sorted(unknown)}", path=path)
    for key in ("id", "requirement"):
        if key not in raw:
            raise SchemaError(f"missing required field {key!r}", path=path)
        if not isinstance(raw[key], str):
            raise SchemaError("must be a string", path=f"{path}.{key}")

    weight = raw.get("weight", 1)
    if isinstance(weight, bool) or not isinstance(weight, int):
        raise SchemaError("must be an integer", path=f"{path}.weight")

    category = None
    if "category" in raw:
        token = raw["category"]
        if token not in _CATEGORY_TOKENS:
            raise SchemaError(
                f"must be one of {sorted(_CATEGORY_TOKENS)}", path=f"{path}.category"
            )
        category = TaskCategory(token)

    children: tuple[RubricNode, ...] = ()
    if "children" in raw:
        if not isinstance(raw["children"], list) or not raw["children"]:
            raise SchemaError("must be a non-empty list", path=f"{path}.children")
        children = tuple(
            _parse_node(child, f"{path}.children[{i}]")
            for i, child in enumerate(raw["children"])
        )

    return RubricNode(
        id=raw["id"],
        requirement=raw["requirement"],
        weight=weight,
        category=category,
        children=children,
    )


def _validate(rubric: Rubric) -> None:
    seen: set[str] = set()

    def walk(node: RubricNode) -> None:
        if node.id in seen:
            raise RubricValidationError(f"duplicate node id {node.id!r}")
        seen.add(node.id)
        if not node.requirement.strip():
            raise RubricValidationError(f"node {node.id!r} has an empty requirement")
        if node.weight < 1:
            raise RubricValidationError(
                f"node {node.id!r} has weight {node.weight}; weights must be >= 1"
            )
        if node.children and node.category is not None:
            raise RubricValidationError(
                f"node {node.id!r} has children and a category; "
                "only leaf nodes may carry a task category"
            )
        if not node.children and node.category is None:
            raise RubricValidationError(
                f"leaf node {node.id!r} has no task category"
            )
        for child in node.children:
            walk(child)

    walk(rubric.root)


def load_rubric(path) -> Rubric:
    """Load a rubric from a .json/.yaml/.yml file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rubric(fh.read())


# ---------------------------------------------------------------------------
# Serialization (canonical JSON)
# ---------------------------------------------------------------------------

def rubric_to_dict(rubric: Rubric) -> dict:
    return {
        "name": rubric.name,
        "version": rubric.version,
        "metadata": dict(rubric.metadata),
        "root": _node_to_dict(rubric.root),
    }


def _node_to_dict(node: RubricNode) -> dict:
    out: dict = {"id": node.id, "requirement": node.requirement, "weight": node.weight}
    if node.is_leaf:
        out["category"] = node.category.value if node.category else None
    else:
        out["children"] = [_node_to_dict(c) for c in node.children]
    return out


def canonical_json(obj) -> str:
    """Deterministic JSON used for all on-disk canonical forms."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def serialize_rubric(rubric: Rubric) -> str:
    """Canonical JSON form; parse_rubric(serialize_rubric(r)) == r."""
    return canonical_json(rubric_to_dict(rubric))


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def leaf_nodes(rubric: Rubric) -> list[RubricNode]:
    """All leaves in depth-first document order."""
    leaves: list[RubricNode] = []

    def walk(node: RubricNode) -> None:
        if node.is_leaf:
            leaves.append(node)
        for child in node.children:
            walk(child)

    walk(rubric.root)
    return leaves


def propagate_scores(rubric: Rubric, verdicts: dict[str, Verdict]) -> ScoreReport:
    """Score every node: leaf = its verdict, internal = weighted child average.

    The verdict map must cover exactly the rubric's leaf set; partial maps
    are rejected so silent defaults can never corrupt downstream metrics.
    """
    leaf_ids = set(rubric.leaf_ids)
    given = {k: Verdict.from_any(v) for k, v in verdicts.items()}
    unknown = set(given) - leaf_ids
    if unknown:
        raise UnknownLeafError(f"verdicts for unknown/non-leaf ids: {sorted(unknown)}")
    missing = leaf_ids - set(given)
    if missing:
        raise MissingVerdictError(f"no verdict for leaves: {sorted(missing)}")

    per_node: dict[str, float] = {}

    def score(node: RubricNode) -> float:
        if node.is_leaf:
            value = given[node.id].value_as_score
        else:
            total_weight = sum(c.weight for c in node.children)
            value = sum(c.weight * score(c) for c in node.children) / total_weight
        per_node[node.id] = value
        return value

    composite = score(rubric.root)
    return ScoreReport(per_node=per_node, composite=composite)


def partial_scores(rubric: Rubric, verdicts: dict[str, Verdict]) -> dict[str, float]:
    """Scores for the subtrees whose leaves are all graded.

    Unlike propagate_scores this accepts a partial verdict map; a node
    appears in the result only when every leaf under it has a verdict.
    Backs live previews while grading is still in progress.
    """
    given = {k: Verdict.from_any(v) for k, v in verdicts.items()}
    leaf_ids = set(rubric.leaf_ids)
    unknown = set(given) - leaf_ids
    if unknown:
        raise UnknownLeafError(f"verdicts for unknown/non-leaf ids: {sorted(unknown)}")

    out: dict[str, float] = {}

    def walk(node: RubricNode) -> tuple[bool, float]:
        if node.is_leaf:
            if node.id not in given:
                return False, 0.0
            value = given[node.id].value_as_score
            out[node.id] = value
            return True, value
        covered = True
        numerator = 0.0
        denominator = 0
        for child in node.children:
            child_covered, child_score = walk(child)
            covered = covered and child_covered
            numerator += child.weight * child_score
            denominator += child.weight
        if not covered:
            return False, 0.0
        value = numerator / denominator
        out[node.id] = value
        return True, value

    walk(rubric.root)
    return out


# ---------------------------------------------------------------------------
# Lint
# ---------------------------------------------------------------------------

def lint_rubric(
    rubric: Rubric,
    min_words: int = DEFAULT_MIN_REQUIREMENT_WORDS,
    vague_terms: tuple[str, ...] = DEFAULT_VAGUE_TERMS,
) -> list[LintWarning]:
    """Non-fatal authoring warnings.

    Flags leaf requirements that are too short to be unambiguous, contain
    vague quantifiers, or duplicate a sibling leaf verbatim. Loosely phrased
    requirements are the main source of judges inventing extra criteria, so
    the lint is deliberately picky.
    """
    warnings: list[LintWarning] = []

    def check_leaf(leaf: RubricNode) -> None:
        text = leaf.requirement.strip()
        if len(text.split()) < min_words:
            warnings.append(
                LintWarning(
                    code="TOO_SHORT",
                    node_id=leaf.id,
                    message=(
                        f"requirement has {len(text.split())} words "
                        f"(minimum {min_words}); short requirements invite "
                        "judge interpretation"
                    ),
                )
            )
        words = {w.strip(".,;:!?\"'()") for w in text.lower().split()}
        for term in vague_terms:
            if term in words:
                warnings.append(
                    LintWarning(
                        code="VAGUE_TERM",
                        node_id=leaf.id,
                        message=f"requirement contains vague quantifier {term!r}",
                    )
                )
                break

    def walk(node: RubricNode) -> None:
        if node.is_leaf:
            check_leaf(node)
            return
        sibling_texts: dict[str, str] = {}
        for child in node.children:
            if child.is_leaf:
                text = child.requirement.strip()
                if text in sibling_texts:
                    warnings.append(
                        LintWarning(
                            code="DUPLICATE_REQUIREMENT",
                            node_id=child.id,
                            message=(
                                "requirement text duplicates sibling "
                                f"{sibling_texts[text]!r}"
                            ),
                        )
                    )
                else:
                    sibling_texts[text] = child.id
            walk(child)

    walk(rubric.root)
    return warnings
