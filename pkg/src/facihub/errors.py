"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine-domain errors."""


class NotFoundError(EngineError):
    """An id does not name any known entity."""


class IntegrityError(EngineError):
    """A stored entity references an ancestor that does not exist."""

    def __init__(self, message: str, missing_id: str | None = None):
        super().__init__(message)
        self.missing_id = missing_id


class ConflictError(EngineError):
    """A write lost against an earlier, authoritative write."""

    def __init__(self, message: str, existing=None):
        super().__init__(message)
        self.existing = existing


class GenerationTransportError(EngineError):
    """The completion client could not be reached; safe to retry."""


class UnparseableOutputError(EngineError):
    """Model output could not be parsed after all retries."""

    def __init__(self, message: str, raw_output: str):
        super().__init__(message)
        self.raw_output = raw_output


class RoleViolationError(EngineError):
    """Model chose a role outside the enabled role set."""

    def __init__(self, message: str, role: str, raw_output: str = ""):
        super().__init__(message)
        self.role = role
        self.raw_output = raw_output


class SampleSizeError(EngineError):
    """Sample too small (or too large) for the requested procedure."""


class DegenerateSampleError(EngineError):
    """Sample carries no usable variation (constant, all-zero, ...)."""


class AnalysisError(EngineError):
    """An analysis has no eligible data to operate on."""
