"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can report failures consistently.
"""


class TrajudgeError(Exception):
    """Base class for all errors raised by this package."""

    code = "ERROR"


class SchemaError(TrajudgeError):
    """A document does not match its file schema (wrong type, missing field)."""

    code = "SCHEMA_ERROR"

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class RubricValidationError(TrajudgeError):
    """A structurally well-formed rubric violates a semantic constraint."""

    code = "VALIDATION_ERROR"


class MissingVerdictError(TrajudgeError):
    """A verdict map does not cover every leaf of the rubric."""

    code = "MISSING_VERDICT"


class UnknownLeafError(TrajudgeError):
    """A verdict map names an id that is not a leaf of the rubric."""

    code = "UNKNOWN_LEAF"


class BadRegexError(TrajudgeError):
    code = "BAD_REGEX"


class IndexOutOfRangeError(TrajudgeError):
    code = "INDEX_OUT_OF_RANGE"


class MissingCategoryTemplateError(TrajudgeError):
    code = "MISSING_CATEGORY_TEMPLATE"


class ProviderError(TrajudgeError):
    """Transport or auth failure talking to a chat-completion provider."""

    code = "PROVIDER_ERROR"


class EmptyMatrixError(TrajudgeError):
    code = "EMPTY_MATRIX"


class InsufficientRunsError(TrajudgeError):
    code = "INSUFFICIENT_RUNS"


class MissingTruthError(TrajudgeError):
    """A verdict has no matching ground-truth label."""

    code = "MISSING_TRUTH"


class UnknownLeafIdError(TrajudgeError):
    code = "UNKNOWN_LEAF_ID"


class DuplicateModelIdError(TrajudgeError):
    code = "DUPLICATE_MODEL_ID"


class RunExistsError(TrajudgeError):
    """A run directory with this run_id already exists (use force to overwrite)."""

    code = "RUN_EXISTS"
