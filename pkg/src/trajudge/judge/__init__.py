from .prompts import BASE_SYSTEM_PROMPT, CATEGORY_TEMPLATES, build_judge_prompt, load_category_templates
from .providers import (
    ChatCompletionProvider,
    HttpChatProvider,
    JudgeScript,
    ModelTurn,
    ProviderConfig,
    ScriptedProvider,
    ToolCallRequest,
    estimate_message_tokens,
    estimate_tokens,
    load_script,
    parse_provider_configs,
    parse_script,
)
from .runner import (
    judge_trajectory,
    random_judge,
    run_leaf_judgment,
    run_leaf_session,
)
from .session import (
    JUDGE_TOOL_NAMES,
    JUDGE_TOOL_SCHEMAS,
    JudgeBudget,
    JudgeSession,
    JudgeToolCall,
    SessionState,
    ToolLimits,
    compress_context,
    dispatch_judge_tool,
)

__all__ = [
    "BASE_SYSTEM_PROMPT",
    "CATEGORY_TEMPLATES",
    "ChatCompletionProvider",
    "HttpChatProvider",
    "JUDGE_TOOL_NAMES",
    "JUDGE_TOOL_SCHEMAS",
    "JudgeBudget",
    "JudgeScript",
    "JudgeSession",
    "JudgeToolCall",
    "ModelTurn",
    "ProviderConfig",
    "ScriptedProvider",
    "SessionState",
    "ToolCallRequest",
    "ToolLimits",
    "build_judge_prompt",
    "compress_context",
    "dispatch_judge_tool",
    "estimate_message_tokens",
    "estimate_tokens",
    "judge_trajectory",
    "load_category_templates",
    "load_script",
    "parse_provider_configs",
    "parse_script",
    "random_judge",
    "run_leaf_judgment",
    "run_leaf_session",
]
