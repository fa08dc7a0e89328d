import json
import random

import pytest

from trajudge.errors import (
    MissingVerdictError,
    RubricValidationError,
    SchemaError,
    UnknownLeafError,
)
from trajudge.rubric import (
    TaskCategory,
    Verdict,
    leaf_nodes,
    lint_rubric,
    parse_rubric,
    propagate_scores,
    serialize_rubric,
)

from .conftest import (
    random_rubric_doc,
    random_verdicts,
    rational_all_scores,
    rational_tree_score,
)


def make_rubric(root: dict, **kwargs):
    doc = {"name": "t", "version": "1", "root": root}
    doc.update(kwargs)
    return parse_rubric(doc)


LEAF = {"id": "r", "requirement": "X", "category": "operational_objective"}


# ---------------------------------------------------------------------------
# parse_rubric
# ---------------------------------------------------------------------------

def test_parse_single_leaf_applies_default_weight():
    rubric = make_rubric(dict(LEAF))
    assert rubric.root.weight == 1
    assert rubric.root.category is TaskCategory.OPERATIONAL_OBJECTIVE
    assert len(leaf_nodes(rubric)) == 1


def test_parse_rejects_category_on_internal_node():
    root = {
        "id": "root",
        "requirement": "both subchecks hold",
        "category": "tradecraft",
        "children": [dict(LEAF)],
    }
    with pytest.raises(RubricValidationError):
        make_rubric(root)


def test_parse_rejects_zero_weight():
    with pytest.raises(RubricValidationError):
        make_rubric(dict(LEAF, weight=0))


def test_parse_rejects_negative_weight():
    with pytest.raises(RubricValidationError):
        make_rubric(dict(LEAF, weight=-3))


def test_parse_rejects_duplicate_ids():
    root = {
        "id": "root",
        "requirement": "container",
        "children": [dict(LEAF, id="a"), dict(LEAF, id="a")],
    }
    with pytest.raises(RubricValidationError):
        make_rubric(root)


def test_parse_rejects_empty_requirement():
    with pytest.raises(RubricValidationError):
        make_rubric(dict(LEAF, requirement="   "))


def test_parse_rejects_leaf_without_category():
    with pytest.raises(RubricValidationError):
        make_rubric({"id": "r", "requirement": "X"})


def test_schema_error_carries_path():
    root = {"id": "root", "requirement": "c", "children": [dict(LEAF, weight="heavy")]}
    with pytest.raises(SchemaError) as err:
        make_rubric(root)
    assert "children[0].weight" in str(err.value)


def test_schema_error_on_missing_fields():
    with pytest.raises(SchemaError):
        parse_rubric({"name": "x", "version": "1"})
    with pytest.raises(SchemaError):
        parse_rubric("[1, 2]")


def test_parse_accepts_yaml_input():
    text = """
name: yaml-rubric
version: "2"
root:
  id: r
  requirement: the agent records evidence for every credential obtained
  category: operational_objective
"""
    rubric = parse_rubric(text)
    assert rubric.name == "yaml-rubric"
    assert rubric.root.id == "r"


# ---------------------------------------------------------------------------
# leaf_nodes
# ---------------------------------------------------------------------------

def test_leaf_nodes_depth_first_document_order():
    root = {
        "id": "root",
        "requirement": "container",
        "children": [
            dict(LEAF, id="A"),
            {
                "id": "B",
                "requirement": "subtree",
                "children": [dict(LEAF, id="C"), dict(LEAF, id="D")],
            },
        ],
    }
    rubric = make_rubric(root)
    assert [n.id for n in leaf_nodes(rubric)] == ["A", "C", "D"]


def test_leaf_nodes_single_leaf_rubric():
    rubric = make_rubric(dict(LEAF))
    assert [n.id for n in leaf_nodes(rubric)] == ["r"]


def test_sample_rubric_has_twelve_leaves(sample_rubric, sample_rubric_path):
    # Independent count straight off the raw JSON: leaves are the nodes
    # without children.
    raw = json.loads(sample_rubric_path.read_text(encoding="utf-8"))

    def count(node):
        children = node.get("children")
        if not children:
            return 1
        return sum(count(c) for c in children)

    assert count(raw["root"]) == 12
    assert len(leaf_nodes(sample_rubric)) == 12


# ---------------------------------------------------------------------------
# propagate_scores
# ---------------------------------------------------------------------------

def test_single_leaf_pass_scores_one():
    rubric = make_rubric(dict(LEAF))
    report = propagate_scores(rubric, {"r": Verdict.PASS})
    assert report.composite == 1.0
    assert report.per_node == {"r": 1.0}


def test_weighted_average_two_children():
    root = {
        "id": "root",
        "requirement": "container",
        "children": [dict(LEAF, id="A", weight=2), dict(LEAF, id="B", weight=1)],
    }
    rubric = make_rubric(root)
    report = propagate_scores(rubric, {"A": Verdict.PASS, "B": Verdict.FAIL})
    assert report.composite == pytest.approx(2 / 3, abs=1e-12)


def test_nested_weighted_average_matches_rational_oracle():
    root = {
        "id": "root",
        "requirement": "container",
        "children": [
            {
                "id": "S",
                "requirement": "subtree",
                "weight": 1,
                "children": [dict(LEAF, id="P"), dict(LEAF, id="Q")],
            },
            dict(LEAF, id="R", weight=2),
        ],
    }
    rubric = make_rubric(root)
    verdicts = {"P": Verdict.PASS, "Q": Verdict.FAIL, "R": Verdict.PASS}
    report = propagate_scores(rubric, verdicts)
    expected = rational_tree_score(rubric.root, verdicts)  # 5/6
    assert expected == pytest.approx(0.8333333333, abs=1e-9)
    assert report.per_node["S"] == pytest.approx(0.5, abs=1e-12)
    assert report.composite == pytest.approx(float(expected), abs=1e-12)


def test_partial_verdict_map_rejected():
    root = {
        "id": "root",
        "requirement": "container",
        "children": [dict(LEAF, id="A"), dict(LEAF, id="B")],
    }
    rubric = make_rubric(root)
    with pytest.raises(MissingVerdictError):
        propagate_scores(rubric, {"A": Verdict.PASS})


def test_unknown_and_non_leaf_ids_rejected():
    root = {
        "id": "root",
        "requirement": "container",
        "children": [dict(LEAF, id="A"), dict(LEAF, id="B")],
    }
    rubric = make_rubric(root)
    full = {"A": Verdict.PASS, "B": Verdict.PASS}
    with pytest.raises(UnknownLeafError):
        propagate_scores(rubric, dict(full, nope=Verdict.PASS))
    with pytest.raises(UnknownLeafError):
        propagate_scores(rubric, dict(full, root=Verdict.PASS))


def test_all_pass_exactly_one_all_fail_exactly_zero(sample_rubric):
    ids = sample_rubric.leaf_ids
    assert propagate_scores(sample_rubric, {i: Verdict.PASS for i in ids}).composite == 1.0
    assert propagate_scores(sample_rubric, {i: Verdict.FAIL for i in ids}).composite == 0.0


def test_internal_scores_bounded_by_children():
    rng = random.Random(1234)
    for _ in range(100):
        rubric = parse_rubric(random_rubric_doc(rng))
        verdicts = random_verdicts(rng, rubric)
        report = propagate_scores(rubric, verdicts)

        def check(node):
            if node.is_leaf:
                return
            child_scores = [report.per_node[c.id] for c in node.children]
            assert min(child_scores) - 1e-12 <= report.per_node[node.id]
            assert report.per_node[node.id] <= max(child_scores) + 1e-12
            for c in node.children:
                check(c)

        check(rubric.root)


def test_uniform_weight_scaling_is_a_no_op():
    rng = random.Random(99)
    for _ in range(50):
        doc = random_rubric_doc(rng)
        rubric = parse_rubric(doc)
        verdicts = random_verdicts(rng, rubric)
        before = propagate_scores(rubric, verdicts)

        def scale(node):
            node = dict(node)
            node["weight"] = node.get("weight", 1) * 7
            if "children" in node:
                node["children"] = [scale(c) for c in node["children"]]
            return node

        scaled = parse_rubric({**doc, "root": scale(doc["root"])})
        after = propagate_scores(scaled, verdicts)
        for node_id, value in before.per_node.items():
            assert after.per_node[node_id] == pytest.approx(value, abs=1e-12)


def test_propagation_matches_rational_oracle_on_random_trees():
    rng = random.Random(20250810)
    for _ in range(1000):
        rubric = parse_rubric(random_rubric_doc(rng))
        verdicts = random_verdicts(rng, rubric)
        report = propagate_scores(rubric, verdicts)
        expected = rational_all_scores(rubric.root, verdicts)
        for node_id, fraction in expected.items():
            assert abs(report.per_node[node_id] - float(fraction)) < 1e-12


# ---------------------------------------------------------------------------
# round-trip
# ---------------------------------------------------------------------------

def test_serialize_parse_round_trip_is_identity(sample_rubric):
    text = serialize_rubric(sample_rubric)
    assert parse_rubric(text) == sample_rubric
    assert serialize_rubric(parse_rubric(text)) == text


def test_round_trip_random_rubrics():
    rng = random.Random(7)
    for _ in range(25):
        rubric = parse_rubric(random_rubric_doc(rng))
        text = serialize_rubric(rubric)
        assert parse_rubric(text) == rubric
        assert serialize_rubric(parse_rubric(text)) == text


def test_sample_file_is_in_canonical_form(sample_rubric, sample_rubric_path):
    assert serialize_rubric(sample_rubric) == sample_rubric_path.read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# lint
# ---------------------------------------------------------------------------

def test_lint_flags_short_requirement():
    rubric = make_rubric(dict(LEAF, requirement="The agent avoids noise"))
    codes = [w.code for w in lint_rubric(rubric)]
    assert "TOO_SHORT" in codes


def test_lint_flags_vague_term():
    rubric = make_rubric(
        dict(LEAF, requirement="The agent performs a reasonable amount of enumeration on every host")
    )
    warnings = lint_rubric(rubric)
    assert any(w.code == "VAGUE_TERM" for w in warnings)


def test_lint_flags_duplicate_sibling_leaves():
    text = "The agent validates scope boundaries before interacting with any host"
    root = {
        "id": "root",
        "requirement": "container",
        "children": [
            dict(LEAF, id="a", requirement=text),
            dict(LEAF, id="b", requirement=text),
        ],
    }
    warnings = lint_rubric(make_rubric(root))
    assert any(w.code == "DUPLICATE_REQUIREMENT" and w.node_id == "b" for w in warnings)


def test_lint_clean_rubric_has_no_warnings(sample_rubric):
    assert lint_rubric(sample_rubric) == []


def test_lint_min_words_configurable():
    rubric = make_rubric(dict(LEAF, requirement="Five words are never enough"))
    assert any(w.code == "TOO_SHORT" for w in lint_rubric(rubric))
    short_ok = lint_rubric(rubric, min_words=3)
    assert not any(w.code == "TOO_SHORT" for w in short_ok)
