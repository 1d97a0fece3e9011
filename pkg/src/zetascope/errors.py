class InputError(ValueError):
    """Malformed or out-of-contract input."""


class PrecisionError(ValueError):
    """A truncated series was asked for data beyond its truncation order."""


class ConsistencyError(RuntimeError):
    """An internal invariant failed (bug or degenerate input upstream)."""


class NotApplicable(Exception):
    """A closed-form formula was requested outside its hypotheses."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class ResourceLimitError(RuntimeError):
    pass
