"""Leaf verdict records and their JSON Lines on-disk form.

One record per (trajectory, leaf, run) judgment. Costs are carried as
Decimal end to end and serialized as strings so that recomputing
tokens x price always reproduces the stored value exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal

from .rubric import Verdict


@dataclass(frozen=True)
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0
    iterations: int = 0

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(
            input_tokens=self.input_tokens + other.input_tokens,
            output_tokens=self.output_tokens + other.output_tokens,
            iterations=self.iterations + other.iterations,
        )


@dataclass(frozen=True)
class LeafVerdict:
    trajectory_id: str
    leaf_id: str
    verdict: Verdict
    justification: str
    abstained: bool = False
    usage: Usage = field(default_factory=Usage)
    cost_usd: Decimal = Decimal("0")
    wall_time_s: float = 0.0
    run_index: int = 0
    session_id: str = ""
    provider_id: str = ""


def verdict_to_dict(v: LeafVerdict) -> dict:
    return {
        "trajectory_id": v.trajectory_id,
        "leaf_id": v.leaf_id,
        "verdict": v.verdict.value,
        "justification": v.justification,
        "abstained": v.abstained,
        "usage": {
            "input_tokens": v.usage.input_tokens,
            "output_tokens": v.usage.output_tokens,
            "iterations": v.usage.iterations,
        },
        "cost_usd": str(v.cost_usd),
        "wall_time_s": v.wall_time_s,
        "run_index": v.run_index,
        "session_id": v.session_id,
        "provider_id": v.provider_id,
    }


def verdict_from_dict(raw: dict) -> LeafVerdict:
    usage = raw.get("usage", {})
    return LeafVerdict(
        trajectory_id=raw["trajectory_id"],
        leaf_id=raw["leaf_id"],
        verdict=Verdict.from_any(raw["verdict"]),
        justification=raw.get("justification", ""),
        abstained=bool(raw.get("abstained", False)),
        usage=Usage(
            input_tokens=int(usage.get("input_tokens", 0)),
            output_tokens=int(usage.get("output_tokens", 0)),
            iterations=int(usage.get("iterations", 0)),
        ),
        cost_usd=Decimal(str(raw.get("cost_usd", "0"))),
        wall_time_s=float(raw.get("wall_time_s", 0.0)),
        run_index=int(raw.get("run_index", 0)),
        session_id=raw.get("session_id", ""),
        provider_id=raw.get("provider_id", ""),
    )


def write_verdicts_jsonl(path, verdicts: list[LeafVerdict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in verdicts:
            fh.write(json.dumps(verdict_to_dict(v), ensure_ascii=False) + "\n")


def read_verdicts_jsonl(path) -> list[LeafVerdict]:
    out: list[LeafVerdict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(verdict_from_dict(json.loads(line)))
    return out
