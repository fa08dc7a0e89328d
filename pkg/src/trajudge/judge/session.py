"""Judge session state, the judge-facing tool surface, and context compression.

Each rubric leaf gets one isolated session: its own transcript, its own
memory store, its own budget. Nothing flows between sessions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from ..rubric import RubricNode
from ..trajectory import (
    MIN_PAGE_CHARS,
    SearchField,
    SearchMode,
    Trajectory,
    get_call,
    get_tool_definitions,
    search_calls,
)
from ..verdicts import Usage
from .providers import estimate_message_tokens


class SessionState(str, Enum):
    RUNNING = "running"
    COMPLETED = "completed"
    ABSTAINED = "abstained"
    ERROR = "error"


@dataclass(frozen=True)
class JudgeBudget:
    max_iterations: int = 50
    max_total_tokens: int = 400_000
    # Compression kicks in at this transcript estimate; defaults to 75% of
    # the token budget when unset.
    compress_threshold_tokens: int | None = None

    @property
    def effective_compress_threshold(self) -> int:
        if self.compress_threshold_tokens is not None:
            return self.compress_threshold_tokens
        return int(self.max_total_tokens * 0.75)


@dataclass(frozen=True)
class ToolLimits:
    page_chars: int = 4096
    max_search_hits: int = 25


@dataclass
class JudgeSession:
    session_id: str
    leaf: RubricNode
    trajectory_id: str
    category_prompt: str
    budget: JudgeBudget
    transcript: list[dict] = field(default_factory=list)
    memories: list[str] = field(default_factory=list)
    usage: Usage = field(default_factory=Usage)
    state: SessionState = SessionState.RUNNING
    elided_exchanges: int = 0


@dataclass(frozen=True)
class JudgeToolCall:
    name: str
    arguments: dict


SUBMIT_VERDICT_SCHEMA = {
    "type": "function",
    "function": {
        "name": "submit_verdict",
        "description": (
            "Record your final pass/fail verdict for the requirement, with a "
            "short evidence-backed justification. Ends the session."
        ),
        "parameters": {
            "type": "object",
            "properties": {
                "verdict": {"type": "string", "enum": ["pass", "fail"]},
                "justification": {"type": "string"},
            },
            "required": ["verdict", "justification"],
        },
    },
}

JUDGE_TOOL_SCHEMAS = [
    {
        "type": "function",
        "function": {
            "name": "get_tool_definitions",
            "description": (
                "List the tool definitions that were available to the agent "
                "whose trajectory you are judging."
            ),
            "parameters": {"type": "object", "properties": {}},
        },
    },
    {
        "type": "function",
        "function": {
            "name": "search_trajectory",
            "description": (
                "Search every recorded tool call for a query. Scope may be any "
                "of arguments/response/tool_name (default: all). Substring "
                "search is case-insensitive; set mode=regex for patterns."
            ),
            "parameters": {
                "type": "object",
                "properties": {
                    "query": {"type": "string"},
                    "scope": {
                        "type": "array",
                        "items": {
                            "type": "string",
                            "enum": ["arguments", "response", "tool_name"],
                        },
                    },
                    "mode": {"type": "string", "enum": ["substring", "regex"]},
                    "case_sensitive": {"type": "boolean"},
                },
                "required": ["query"],
            },
        },
    },
    {
        "type": "function",
        "function": {
            "name": "get_tool_call",
            "description": (
                "Fetch one tool call by index: tool name, full arguments, and "
                "a page of its response (use offset to continue long responses)."
            ),
            "parameters": {
                "type": "object",
                "properties": {
                    "index": {"type": "integer"},
                    "offset": {"type": "integer"},
                    "max_chars": {"type": "integer"},
                },
                "required": ["index"],
            },
        },
    },
    {
        "type": "function",
        "function": {
            "name": "store_memory",
            "description": (
                "Save a short note about a finding (call index, quote, "
                "intermediate judgment) that survives context trimming."
            ),
            "parameters": {
                "type": "object",
                "properties": {"text": {"type": "string"}},
                "required": ["text"],
            },
        },
    },
    {
        "type": "function",
        "function": {
            "name": "list_memories",
            "description": "List every memory stored in this session.",
            "parameters": {"type": "object", "properties": {}},
        },
    },
    SUBMIT_VERDICT_SCHEMA,
]

JUDGE_TOOL_NAMES = {schema["function"]["name"] for schema in JUDGE_TOOL_SCHEMAS}


# ---------------------------------------------------------------------------
# Tool dispatch
# ---------------------------------------------------------------------------

def dispatch_judge_tool(
    session: JudgeSession,
    trajectory: Trajectory,
    call: JudgeToolCall,
    limits: ToolLimits = ToolLimits(),
) -> str:
    """Execute one judge tool call and serialize its result for the model.

    Errors (unknown tool, bad arguments, out-of-range index) come back as
    readable error strings so a confused model can correct itself instead of
    killing the session.
    """
    try:
        if call.name == "get_tool_definitions":
            payload = [
                {"name": d.name, "description": d.description, "parameters": d.parameters}
                for d in get_tool_definitions(trajectory)
            ]
            return json.dumps({"tool_definitions": payload}, ensure_ascii=False)

        if call.name == "search_trajectory":
            query = call.arguments.get("query", "")
            scope_tokens = call.arguments.get("scope") or [f.value for f in SearchField]
            scope = {SearchField(token) for token in scope_tokens}
            mode = SearchMode(call.arguments.get("mode", "substring"))
            hits = search_calls(
                trajectory,
                query,
                scope=scope,
                mode=mode,
                case_sensitive=bool(call.arguments.get("case_sensitive", False)),
            )
            shown = hits[: limits.max_search_hits]
            result = {
                "total_matches": len(hits),
                "hits": [
                    {
                        "call_index": h.call_index,
                        "field": h.field.value,
                        "snippet": h.snippet,
                        "match_count_in_record": h.match_count_in_record,
                    }
                    for h in shown
                ],
            }
            if len(hits) > len(shown):
                result["note"] = f"{len(hits) - len(shown)} more matches not shown"
            return json.dumps(result, ensure_ascii=False)

        if call.name == "get_tool_call":
            index = int(call.arguments["index"])
            offset = max(0, int(call.arguments.get("offset", 0)))
            max_chars = int(call.arguments.get("max_chars", limits.page_chars))
            max_chars = max(MIN_PAGE_CHARS, min(max_chars, limits.page_chars))
            page = get_call(trajectory, index, offset=offset, max_chars=max_chars)
            result = {
                "index": page.index,
                "tool_name": page.tool_name,
                "is_subagent": page.is_subagent,
                "arguments": page.arguments_text,
                "response_chunk": page.response_chunk,
                "offset": page.offset,
                "total_response_chars": page.total_response_chars,
            }
            if page.has_more:
                result["note"] = (
                    f"response continues; call again with offset="
                    f"{page.offset + len(page.response_chunk)}"
                )
            return json.dumps(result, ensure_ascii=False)

        if call.name == "store_memory":
            text = str(call.arguments.get("text", "")).strip()
            if not text:
                return "error: store_memory requires non-empty text"
            session.memories.append(text)
            return f"stored memory #{len(session.memories)}"

        if call.name == "list_memories":
            if not session.memories:
                return "no memories stored yet"
            return "\n".join(
                f"{i + 1}. {text}" for i, text in enumerate(session.memories)
            )

        return f"error: unknown tool {call.name!r}"
    except Exception as exc:  # tool errors go back to the model, never abort
        return f"error: {exc}"


# ---------------------------------------------------------------------------
# Context compression
# ---------------------------------------------------------------------------

def compress_context(
    messages: list[dict],
    memories: list[str],
    threshold_tokens: int,
    keep_latest: int = 1,
) -> tuple[list[dict], int]:
    """Elide the oldest tool exchanges once the transcript outgrows its budget.

    The system prompt and the initial requirement message are never touched.
    Elided exchanges are replaced by a single note plus a re-injection of the
    full memory list, so the judge keeps its findings. Returns the (possibly
    unchanged) message list and the number of exchanges removed.
    """
    if estimate_message_tokens(messages) <= threshold_tokens:
        return messages, 0

    head, tail = messages[:2], messages[2:]

    # An exchange starts at each assistant message and carries its tool
    # results (and any nudges) with it.
    exchanges: list[list[dict]] = []
    for msg in tail:
        if msg.get("role") == "assistant" or not exchanges:
            exchanges.append([msg])
        else:
            exchanges[-1].append(msg)

    elided = 0
    while len(exchanges) > keep_latest:
        remaining = head + [m for group in exchanges for m in group]
        if estimate_message_tokens(remaining) <= threshold_tokens:
            break
        exchanges.pop(0)
        elided += 1

    if elided == 0:
        return messages, 0

    memory_lines = "\n".join(f"- {m}" for m in memories) if memories else "(none)"
    note = {
        "role": "user",
        "content": (
            f"[elided {elided} earlier tool exchanges; consult memories]\n"
            f"Memories so far:\n{memory_lines}"
        ),
    }
    return head + [note] + [m for group in exchanges for m in group], elided
