"""Chat-completion providers behind a single tool-calling interface.

The wire shape is the OpenAI-style chat-completions protocol (messages in,
optional tool calls out), which every model family we target speaks. Two
implementations ship: an HTTP client with retries, and a deterministic
scripted provider that replays canned turns for tests and offline runs.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from decimal import Decimal

import httpx

from ..errors import ProviderError, SchemaError
from ..verdicts import Usage

RETRY_DELAYS_S = (1.0, 4.0, 16.0)


def estimate_tokens(text: str) -> int:
    """Cheap chars/4 heuristic; a safety valve, not an accounting source."""
    return max(1, len(text) // 4)


def estimate_message_tokens(messages: list[dict]) -> int:
    total = 0
    for msg in messages:
        total += estimate_tokens(str(msg.get("content") or ""))
        for tc in msg.get("tool_calls", ()):
            total += estimate_tokens(json.dumps(tc))
    return total


@dataclass(frozen=True)
class ProviderConfig:
    provider_id: str
    endpoint: str = ""
    model_name: str = ""
    temperature: float = 1.0
    max_output_tokens: int = 2048
    price_per_million_input_tokens: Decimal = Decimal("0")
    price_per_million_output_tokens: Decimal = Decimal("0")
    auth_env: str = ""

    def __post_init__(self):
        if self.price_per_million_input_tokens < 0 or self.price_per_million_output_tokens < 0:
            raise ValueError("prices must be >= 0")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")

    def cost_for(self, usage: Usage) -> Decimal:
        """Exact decimal cost; recomputable from the stored token counts."""
        return (
            usage.input_tokens * self.price_per_million_input_tokens
            + usage.output_tokens * self.price_per_million_output_tokens
        ) / Decimal(10 ** 6)


@dataclass(frozen=True)
class ToolCallRequest:
    call_id: str
    name: str
    arguments_raw: str  # JSON text as emitted by the model; may be malformed


@dataclass(frozen=True)
class ModelTurn:
    content: str = ""
    tool_calls: tuple[ToolCallRequest, ...] = ()
    input_tokens: int = 0
    output_tokens: int = 0


class ProviderSession:
    """One model conversation; sequential, confined to a single judge session."""

    def complete(self, messages: list[dict], tools: list[dict]) -> ModelTurn:
        raise NotImplementedError


class ChatCompletionProvider:
    """Factory for per-judge-session conversations."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    def start_session(self, leaf_id: str) -> ProviderSession:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# HTTP provider
# ---------------------------------------------------------------------------

class HttpChatProvider(ChatCompletionProvider):
    """Talks to a chat-completions endpoint over HTTP with bounded retries.

    ``config.endpoint`` is the full completions URL. The bearer credential is
    read from the environment variable named in ``config.auth_env``; the
    secret itself never appears in configs or manifests.
    """

    def __init__(self, config: ProviderConfig, timeout_s: float = 120.0):
        super().__init__(config)
        if not config.endpoint:
            raise ValueError("HTTP provider requires an endpoint URL")
        self._timeout = timeout_s
        self._client = httpx.Client(timeout=timeout_s)

    def start_session(self, leaf_id: str) -> ProviderSession:
        return _HttpSession(self)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_env:
            secret = os.environ.get(self.config.auth_env, "")
            if not secret:
                raise ProviderError(
                    f"environment variable {self.config.auth_env!r} is not set"
                )
            headers["Authorization"] = f"Bearer {secret}"
        return headers

    def _post(self, body: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(len(RETRY_DELAYS_S) + 1):
            try:
                response = self._client.post(
                    self.config.endpoint, json=body, headers=self._headers()
                )
                if response.status_code >= 500 or response.status_code == 429:
                    raise ProviderError(
                        f"provider returned HTTP {response.status_code}"
                    )
                if response.status_code >= 400:
                    # Client errors are not retryable.
                    raise ProviderError(
                        f"provider rejected request: HTTP {response.status_code} "
                        f"{response.text[:500]}"
                    ) from None
                return response.json()
            except ProviderError as exc:
                if "rejected request" in str(exc):
                    raise
                last_error = exc
            except httpx.HTTPError as exc:
                last_error = exc
            if attempt < len(RETRY_DELAYS_S):
                time.sleep(RETRY_DELAYS_S[attempt])
        raise ProviderError(
            f"provider unreachable after {len(RETRY_DELAYS_S) + 1} attempts: {last_error}"
        )


class _HttpSession(ProviderSession):
    def __init__(self, provider: HttpChatProvider):
        self._provider = provider

    def complete(self, messages: list[dict], tools: list[dict]) -> ModelTurn:
        config = self._provider.config
        body = {
            "model": config.model_name,
            "messages": messages,
            "temperature": config.temperature,
            "max_tokens": config.max_output_tokens,
        }
        if tools:
            body["tools"] = tools
        data = self._provider._post(body)
        try:
            message = data["choices"][0]["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        tool_calls = tuple(
            ToolCallRequest(
                call_id=tc.get("id", f"call-{i}"),
                name=tc.get("function", {}).get("name", ""),
                arguments_raw=tc.get("function", {}).get("arguments", "{}"),
            )
            for i, tc in enumerate(message.get("tool_calls") or ())
        )
        usage = data.get("usage") or {}
        return ModelTurn(
            content=message.get("content") or "",
            tool_calls=tool_calls,
            input_tokens=int(usage.get("prompt_tokens", 0))
            or estimate_message_tokens(messages),
            output_tokens=int(usage.get("completion_tokens", 0))
            or estimate_tokens(str(message.get("content") or "")),
        )


# ---------------------------------------------------------------------------
# Scripted provider (deterministic mock)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScriptTurn:
    content: str = ""
    tool_calls: tuple[ToolCallRequest, ...] = ()
    input_tokens: int | None = None
    output_tokens: int | None = None


@dataclass(frozen=True)
class JudgeScript:
    """Exact sequence of model turns to emit, optionally per rubric leaf."""

    default: tuple[ScriptTurn, ...] = ()
    per_leaf: dict[str, tuple[ScriptTurn, ...]] = field(default_factory=dict)

    def turns_for(self, leaf_id: str) -> tuple[ScriptTurn, ...]:
        return self.per_leaf.get(leaf_id, self.default)


def parse_script(document: str | dict | list) -> JudgeScript:
    """Parse a mock script: a bare turn list, or {default, leaves}."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"unparseable script JSON: {exc}") from exc
    else:
        doc = document

    def parse_turns(raw_turns, path: str) -> tuple[ScriptTurn, ...]:
        if not isinstance(raw_turns, list):
            raise SchemaError("must be a list of turns", path=path)
        turns = []
        for i, raw in enumerate(raw_turns):
            if not isinstance(raw, dict):
                raise SchemaError("turn must be an object", path=f"{path}[{i}]")
            calls = []
            for j, tc in enumerate(raw.get("tool_calls", ())):
                if not isinstance(tc, dict) or "name" not in tc:
                    raise SchemaError(
                        "tool call needs a name", path=f"{path}[{i}].tool_calls[{j}]"
                    )
                arguments = tc.get("arguments", {})
                raw_args = (
                    arguments if isinstance(arguments, str) else json.dumps(arguments)
                )
                calls.append(
                    ToolCallRequest(
                        call_id=f"script-{i}-{j}", name=tc["name"], arguments_raw=raw_args
                    )
                )
            usage = raw.get("usage", {})
            turns.append(
                ScriptTurn(
                    content=str(raw.get("content", "")),
                    tool_calls=tuple(calls),
                    input_tokens=usage.get("input_tokens"),
                    output_tokens=usage.get("output_tokens"),
                )
            )
        return tuple(turns)

    if isinstance(doc, list):
        return JudgeScript(default=parse_turns(doc, "$"))
    if isinstance(doc, dict):
        default = parse_turns(doc.get("default", []), "$.default")
        leaves = doc.get("leaves", {})
        if not isinstance(leaves, dict):
            raise SchemaError("must be an object", path="$.leaves")
        per_leaf = {
            leaf_id: parse_turns(turns, f"$.leaves.{leaf_id}")
            for leaf_id, turns in leaves.items()
        }
        return JudgeScript(default=default, per_leaf=per_leaf)
    raise SchemaError("script must be a list of turns or an object")


def load_script(path) -> JudgeScript:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_script(fh.read())


class ScriptedProvider(ChatCompletionProvider):
    """Replays a fixed turn script; every session gets its own cursor.

    Token usage is derived deterministically from message sizes (unless the
    script pins explicit counts), so cost accounting is exercised end to end
    without a live model.
    """

    def __init__(self, script: JudgeScript, config: ProviderConfig | None = None):
        super().__init__(
            config
            or ProviderConfig(
                provider_id="mock",
                model_name="scripted",
                price_per_million_input_tokens=Decimal("1.00"),
                price_per_million_output_tokens=Decimal("2.00"),
            )
        )
        self.script = script

    def start_session(self, leaf_id: str) -> ProviderSession:
        return _ScriptedSession(self.script.turns_for(leaf_id))


class _ScriptedSession(ProviderSession):
    def __init__(self, turns: tuple[ScriptTurn, ...]):
        self._turns = turns
        self._cursor = 0

    def complete(self, messages: list[dict], tools: list[dict]) -> ModelTurn:
        if self._cursor < len(self._turns):
            turn = self._turns[self._cursor]
            self._cursor += 1
        else:
            turn = ScriptTurn(content="No further scripted turns.")
        output_text = turn.content + "".join(
            tc.name + tc.arguments_raw for tc in turn.tool_calls
        )
        return ModelTurn(
            content=turn.content,
            tool_calls=turn.tool_calls,
            input_tokens=(
                turn.input_tokens
                if turn.input_tokens is not None
                else estimate_message_tokens(messages)
            ),
            output_tokens=(
                turn.output_tokens
                if turn.output_tokens is not None
                else estimate_tokens(output_text)
            ),
        )


# ---------------------------------------------------------------------------
# Provider config files
# ---------------------------------------------------------------------------

def parse_provider_configs(doc: dict) -> dict[str, ProviderConfig]:
    """Read the ``providers`` section of a config document."""
    raw_providers = doc.get("providers", [])
    if not isinstance(raw_providers, list):
        raise SchemaError("must be a list", path="$.providers")
    configs: dict[str, ProviderConfig] = {}
    for i, raw in enumerate(raw_providers):
        path = f"$.providers[{i}]"
        if not isinstance(raw, dict) or "provider_id" not in raw:
            raise SchemaError("provider entry needs a provider_id", path=path)
        pid = raw["provider_id"]
        if pid in configs:
            raise SchemaError(f"duplicate provider_id {pid!r}", path=path)
        try:
            configs[pid] = ProviderConfig(
                provider_id=pid,
                endpoint=raw.get("endpoint", ""),
                model_name=raw.get("model_name", ""),
                temperature=float(raw.get("temperature", 1.0)),
                max_output_tokens=int(raw.get("max_output_tokens", 2048)),
                price_per_million_input_tokens=Decimal(
                    str(raw.get("price_per_million_input_tokens", "0"))
                ),
                price_per_million_output_tokens=Decimal(
                    str(raw.get("price_per_million_output_tokens", "0"))
                ),
                auth_env=raw.get("auth_env", ""),
            )
        except (ValueError, ArithmeticError) as exc:
            raise SchemaError(str(exc), path=path) from exc
    return configs
