"""Shared fixtures: sample file paths, random rubric/trajectory builders,
and the independent oracles the derived expectations are frozen against."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

import pytest

from trajudge.rubric import Rubric, RubricNode, TaskCategory, Verdict, parse_rubric
from trajudge.trajectory import (
    SearchField,
    Trajectory,
    canonical_arguments,
    load_trajectory,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
SAMPLES = REPO_ROOT / "samples"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def sample_rubric_path() -> Path:
    return SAMPLES / "goad-north.rubric.json"


@pytest.fixture(scope="session")
def sample_trajectory_path() -> Path:
    return SAMPLES / "pentest-run-1.traj.json"


@pytest.fixture(scope="session")
def sample_rubric(sample_rubric_path) -> Rubric:
    return parse_rubric(sample_rubric_path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def sample_trajectory(sample_trajectory_path) -> Trajectory:
    return load_trajectory(sample_trajectory_path.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Independent scoring oracle (exact rational arithmetic)
# ---------------------------------------------------------------------------

def rational_tree_score(node: RubricNode, verdicts: dict[str, Verdict]) -> Fraction:
    """Reference weighted-average propagation, exact rationals throughout."""
    if node.is_leaf:
        return Fraction(1 if verdicts[node.id] is Verdict.PASS else 0)
    numerator = Fraction(0)
    denominator = Fraction(0)
    for child in node.children:
        numerator += Fraction(child.weight) * rational_tree_score(child, verdicts)
        denominator += Fraction(child.weight)
    return numerator / denominator


def rational_all_scores(node: RubricNode, verdicts, out=None) -> dict[str, Fraction]:
    if out is None:
        out = {}
    out[node.id] = rational_tree_score(node, verdicts)
    for child in node.children:
        rational_all_scores(child, verdicts, out)
    return out


# ---------------------------------------------------------------------------
# Random builders
# ---------------------------------------------------------------------------

def random_rubric_doc(rng: random.Random, max_depth: int = 5, max_branch: int = 4) -> dict:
    counter = itertools.count()
    categories = [c.value for c in TaskCategory]

    def node(depth: int) -> dict:
        nid = f"n{next(counter)}"
        base = {
            "id": nid,
            "requirement": f"requirement {nid} is satisfied by the recorded run",
            "weight": rng.randint(1, 10),
        }
        if depth >= max_depth or (depth > 0 and rng.random() < 0.45):
            base["category"] = rng.choice(categories)
        else:
            base["children"] = [
                node(depth + 1) for _ in range(rng.randint(1, max_branch))
            ]
        return base

    root = node(0)
    if "category" in root and rng.random() < 0.8:
        # mostly multi-level trees; single-leaf rubrics stay possible
        root = {
            "id": "root",
            "requirement": "the whole recorded engagement meets the bar",
            "weight": 1,
            "children": [root, node(1)],
        }
    return {"name": "random", "version": "0", "root": root}


def random_verdicts(rng: random.Random, rubric: Rubric) -> dict[str, Verdict]:
    return {
        leaf_id: Verdict.PASS if rng.random() < 0.5 else Verdict.FAIL
        for leaf_id in rubric.leaf_ids
    }


WORDS = [
    "nmap", "smb", "vagrant", "NTLM", "kerberos", "hash", "spray", "share",
    "winterfell", "castelblack", "ticket", "sysvol", "admin", "beacon",
]


def random_trajectory_doc(rng: random.Random, n_calls: int | None = None) -> dict:
    n = n_calls if n_calls is not None else rng.randint(0, 12)
    tools = ["run_command", "upload_file", "read_file"]
    calls = []
    for i in range(n):
        arg_words = rng.sample(WORDS, rng.randint(1, 4))
        resp_words = [rng.choice(WORDS) for _ in range(rng.randint(0, 30))]
        calls.append(
            {
                "call_id": f"c{i}",
                "tool_name": rng.choice(tools),
                "arguments": {"command": " ".join(arg_words)},
                "response": " ".join(resp_words),
            }
        )
    return {
        "trajectory_id": f"fuzz-{rng.randint(0, 10**6)}",
        "metadata": {},
        "system_prompt": "system",
        "user_prompt": "user",
        "tool_definitions": [
            {"name": t, "description": "", "parameters": {}} for t in tools
        ],
        "calls": calls,
    }


# ---------------------------------------------------------------------------
# Independent search oracle (naive linear scan)
# ---------------------------------------------------------------------------

def naive_substring_scan(
    trajectory: Trajectory,
    query: str,
    scope=frozenset(SearchField),
    case_sensitive: bool = False,
) -> list[tuple[int, SearchField, int]]:
    """(call_index, field, non-overlapping match count) triples, in order."""
    needle = query if case_sensitive else query.lower()
    results = []
    for call in trajectory.calls:
        for fld in (SearchField.ARGUMENTS, SearchField.RESPONSE, SearchField.TOOL_NAME):
            if fld not in scope:
                continue
            if fld is SearchField.ARGUMENTS:
                text = canonical_arguments(call.arguments)
            elif fld is SearchField.RESPONSE:
                text = call.response
            else:
                text = call.tool_name
            hay = text if case_sensitive else text.lower()
            count = 0
            start = 0
            while True:
                pos = hay.find(needle, start)
                if pos < 0:
                    break
                count += 1
                start = pos + max(len(needle), 1)
            if count:
                results.append((call.index, fld, count))
    return results
