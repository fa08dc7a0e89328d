"""Recorded agent trajectories: ingest, validation, search, paged access.

A trajectory is the full recorded history of one agent run: prompts, the
tool definitions the agent saw, and every tool call with its response.
Loaded trajectories are immutable; searching and paging never mutate them,
so concurrent readers are safe.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import BadRegexError, IndexOutOfRangeError, SchemaError

SNIPPET_WINDOW = 200
MIN_PAGE_CHARS = 256


class SearchField(str, Enum):
    ARGUMENTS = "arguments"
    RESPONSE = "response"
    TOOL_NAME = "tool_name"


class SearchMode(str, Enum):
    SUBSTRING = "substring"
    REGEX = "regex"


ALL_FIELDS = frozenset(SearchField)


@dataclass(frozen=True)
class ToolDefinition:
    name: str
    description: str
    parameters: dict


@dataclass(frozen=True)
class ToolCallRecord:
    index: int
    call_id: str
    tool_name: str
    arguments: dict
    response: str
    is_subagent: bool = False


@dataclass(frozen=True)
class Trajectory:
    trajectory_id: str
    metadata: dict[str, str]
    system_prompt: str
    user_prompt: str
    tool_definitions: tuple[ToolDefinition, ...]
    calls: tuple[ToolCallRecord, ...]
    ingest_warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class SearchHit:
    call_index: int
    field: SearchField
    snippet: str
    match_count_in_record: int


@dataclass(frozen=True)
class CallPage:
    """One page of a (possibly very large) tool-call response."""

    index: int
    call_id: str
    tool_name: str
    arguments_text: str
    response_chunk: str
    offset: int
    total_response_chars: int
    has_more: bool
    is_subagent: bool


@dataclass(frozen=True)
class TrajectoryStats:
    calls: int
    distinct_tools: int
    response_bytes: int
    subagent_calls: int


# ---------------------------------------------------------------------------
# Ingest / serialize
# ---------------------------------------------------------------------------

def canonical_arguments(arguments: dict) -> str:
    """Deterministic text form of a call's arguments (searched and displayed)."""
    return json.dumps(arguments, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def load_trajectory(document: str | dict) -> Trajectory:
    """Parse and validate a trajectory document (JSON text or a mapping).

    Call indices are assigned by position in the event list regardless of
    any index present in the document. Unknown tool names and an empty call
    list are collected as ingest warnings, not errors; real traces drift.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"unparseable JSON: {exc}") from exc
    else:
        doc = document

    if not isinstance(doc, dict):
        raise SchemaError("trajectory document must be an object")
    for key in ("trajectory_id", "system_prompt", "user_prompt", "calls"):
        if key not in doc:
            raise SchemaError(f"missing required field {key!r}")
    if not isinstance(doc["trajectory_id"], str) or not doc["trajectory_id"]:
        raise SchemaError("must be a non-empty string", path="$.trajectory_id")
    for key in ("system_prompt", "user_prompt"):
        if not isinstance(doc[key], str):
            raise SchemaError("must be a string", path=f"$.{key}")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SchemaError("must be an object", path="$.metadata")
    metadata = {str(k): str(v) for k, v in metadata.items()}

    definitions: list[ToolDefinition] = []
    raw_defs = doc.get("tool_definitions", [])
    if not isinstance(raw_defs, list):
        raise SchemaError("must be a list", path="$.tool_definitions")
    seen_names: set[str] = set()
    for i, raw in enumerate(raw_defs):
        path = f"$.tool_definitions[{i}]"
        if not isinstance(raw, dict) or "name" not in raw:
            raise SchemaError("tool definition must be an object with a name", path=path)
        name = raw["name"]
        if not isinstance(name, str) or not name:
            raise SchemaError("must be a non-empty string", path=f"{path}.name")
        if name in seen_names:
            raise SchemaError(f"duplicate tool name {name!r}", path=f"{path}.name")
        seen_names.add(name)
        params = raw.get("parameters", {})
        if not isinstance(params, dict):
            raise SchemaError("must be an object", path=f"{path}.parameters")
        definitions.append(
            ToolDefinition(name=name, description=str(raw.get("description", "")), parameters=params)
        )

    if not isinstance(doc["calls"], list):
        raise SchemaError("must be a list", path="$.calls")
    calls: list[ToolCallRecord] = []
    warnings: list[str] = []
    for i, raw in enumerate(doc["calls"]):
        path = f"$.calls[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("call must be an object", path=path)
        for key in ("tool_name", "response"):
            if key not in raw or not isinstance(raw[key], str):
                raise SchemaError(f"missing or non-string {key!r}", path=path)
        arguments = raw.get("arguments", {})
        if not isinstance(arguments, dict):
            raise SchemaError("must be an object", path=f"{path}.arguments")
        tool_name = raw["tool_name"]
        if seen_names and tool_name not in seen_names:
            warnings.append(
                f"call {i} uses tool {tool_name!r} which is not in tool_definitions"
            )
        calls.append(
            ToolCallRecord(
                index=i,
                call_id=str(raw.get("call_id", f"call-{i}")),
                tool_name=tool_name,
                arguments=arguments,
                response=raw["response"],
                is_subagent=bool(raw.get("is_subagent", False)),
            )
        )

    if not calls:
        warnings.append("trajectory contains zero tool calls")

    return Trajectory(
        trajectory_id=doc["trajectory_id"],
        metadata=metadata,
        system_prompt=doc["system_prompt"],
        user_prompt=doc["user_prompt"],
        tool_definitions=tuple(definitions),
        calls=tuple(calls),
        ingest_warnings=tuple(warnings),
    )


def load_trajectory_file(path) -> Trajectory:
    with open(path, "r", encoding="utf-8") as fh:
        return load_trajectory(fh.read())


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "trajectory_id": traj.trajectory_id,
        "metadata": dict(traj.metadata),
        "system_prompt": traj.system_prompt,
        "user_prompt": traj.user_prompt,
        "tool_definitions": [
            {"name": d.name, "description": d.description, "parameters": d.parameters}
            for d in traj.tool_definitions
        ],
        "calls": [
            {
                "call_id": c.call_id,
                "tool_name": c.tool_name,
                "arguments": c.arguments,
                "response": c.response,
                "is_subagent": c.is_subagent,
            }
            for c in traj.calls
        ],
    }


def serialize_trajectory(traj: Trajectory) -> str:
    """Canonical JSON form; load_trajectory(serialize_trajectory(t)) == t."""
    from .rubric import canonical_json

    return canonical_json(trajectory_to_dict(traj))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def _field_text(call: ToolCallRecord, fld: SearchField) -> str:
    if fld is SearchField.ARGUMENTS:
        return canonical_arguments(call.arguments)
    if fld is SearchField.RESPONSE:
        return call.response
    return call.tool_name


def _make_snippet(text: str, start: int, end: int) -> str:
    """<=200-char snippet with the first match wrapped in >>> <<< markers."""
    window = SNIPPET_WINDOW - 10  # headroom for markers and ellipses
    match_len = end - start
    if match_len >= window:
        lo, hi = start, start + window
    else:
        pad = (window - match_len) // 2
        lo = max(0, start - pad)
        hi = min(len(text), lo + window)
        lo = max(0, hi - window)
    piece = text[lo:hi]
    m_lo = start - lo
    m_hi = min(end, hi) - lo
    snippet = piece[:m_lo] + ">>>" + piece[m_lo:m_hi] + "<<<" + piece[m_hi:]
    if lo > 0:
        snippet = "…" + snippet
    if hi < len(text):
        snippet = snippet + "…"
    return snippet


def search_calls(
    trajectory: Trajectory,
    query: str,
    scope: frozenset[SearchField] | set[SearchField] = ALL_FIELDS,
    mode: SearchMode = SearchMode.SUBSTRING,
    case_sensitive: bool = False,
) -> list[SearchHit]:
    """Find calls whose arguments/response/tool name match the query.

    Substring search is case-insensitive by default; regex is opt-in. Hits
    come back in ascending call order, one per (call, field), each with a
    short marked snippet around the first match.
    """
    if not query:
        raise ValueError("query must be non-empty")
    flags = 0 if case_sensitive else re.IGNORECASE
    if mode is SearchMode.REGEX:
        try:
            pattern = re.compile(query, flags)
        except re.error as exc:
            raise BadRegexError(f"bad regex {query!r}: {exc}") from exc
    else:
        pattern = re.compile(re.escape(query), flags)

    hits: list[SearchHit] = []
    for call in trajectory.calls:
        for fld in (SearchField.ARGUMENTS, SearchField.RESPONSE, SearchField.TOOL_NAME):
            if fld not in scope:
                continue
            text = _field_text(call, fld)
            matches = list(pattern.finditer(text))
            if not matches:
                continue
            first = matches[0]
            hits.append(
                SearchHit(
                    call_index=call.index,
                    field=fld,
                    snippet=_make_snippet(text, first.start(), first.end()),
                    match_count_in_record=len(matches),
                )
            )
    return hits


# ---------------------------------------------------------------------------
# Paged access & stats
# ---------------------------------------------------------------------------

def get_call(
    trajectory: Trajectory,
    index: int,
    offset: int = 0,
    max_chars: int = 4096,
) -> CallPage:
    """A single call with its response paged as [offset, offset+max_chars)."""
    if not 0 <= index < len(trajectory.calls):
        raise IndexOutOfRangeError(
            f"call index {index} out of range (trajectory has {len(trajectory.calls)} calls)"
        )
    if offset < 0:
        raise ValueError("offset must be >= 0")
    if max_chars < MIN_PAGE_CHARS:
        raise ValueError(f"max_chars must be >= {MIN_PAGE_CHARS}")
    call = trajectory.calls[index]
    chunk = call.response[offset: offset + max_chars]
    return CallPage(
        index=call.index,
        call_id=call.call_id,
        tool_name=call.tool_name,
        arguments_text=canonical_arguments(call.arguments),
        response_chunk=chunk,
        offset=offset,
        total_response_chars=len(call.response),
        has_more=offset + max_chars < len(call.response),
        is_subagent=call.is_subagent,
    )


def get_tool_definitions(trajectory: Trajectory) -> list[ToolDefinition]:
    return list(trajectory.tool_definitions)


def stats(trajectory: Trajectory) -> TrajectoryStats:
    return TrajectoryStats(
        calls=len(trajectory.calls),
        distinct_tools=len({c.tool_name for c in trajectory.calls}),
        response_bytes=sum(len(c.response.encode("utf-8")) for c in trajectory.calls),
        subagent_calls=sum(1 for c in trajectory.calls if c.is_subagent),
    )


def load_corpus(directory) -> list[Trajectory]:
    """Load every *.traj.json file in a directory, sorted by filename."""
    from pathlib import Path

    paths = sorted(Path(directory).glob("*.traj.json"))
    return [load_trajectory_file(p) for p in paths]
