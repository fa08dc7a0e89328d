"""trajudge: judge recorded tool-using agent trajectories against rubrics.

Core pieces: hierarchical pass/fail rubrics with weighted-average scoring,
a searchable trajectory store, tool-equipped LLM judge sessions (one per
rubric leaf), and judge-quality metrics against human ground truth.
"""

from .rubric import (
    Rubric,
    RubricNode,
    ScoreReport,
    TaskCategory,
    Verdict,
    leaf_nodes,
    lint_rubric,
    load_rubric,
    parse_rubric,
    propagate_scores,
    serialize_rubric,
)
from .trajectory import (
    SearchField,
    SearchHit,
    SearchMode,
    Trajectory,
    ToolCallRecord,
    ToolDefinition,
    get_call,
    get_tool_definitions,
    load_trajectory,
    load_trajectory_file,
    search_calls,
    serialize_trajectory,
    stats,
)
from .verdicts import LeafVerdict, Usage, read_verdicts_jsonl, write_verdicts_jsonl

__version__ = "0.1.0"
