"""Exception hierarchy shared across the package.

Every error carries a stable ``kind`` string so the CLI and host bindings
can surface the same error identity across process boundaries.
"""

from __future__ import annotations


class EventlineError(Exception):
    """Base class for all library errors."""

    kind = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message or self.kind


# timeline / corpus arithmetic
class UnrepairableError(EventlineError):
    kind = "Unrepairable"


class ZeroDurationError(EventlineError):
    kind = "ZeroDuration"


class EmptyInputError(EventlineError):
    kind = "EmptyInput"


# metrics
class NoGroundTruthError(EventlineError):
    kind = "NoGroundTruth"


# masking
class IndexOutOfRangeError(EventlineError):
    kind = "IndexOutOfRange"


class TooFewEventsError(EventlineError):
    kind = "TooFewEvents"


class TemplateInvalidError(EventlineError):
    kind = "TemplateInvalid"


# upstream LLM interaction
class UpstreamUnavailableError(EventlineError):
    kind = "UpstreamUnavailable"


class MalformedResponseError(EventlineError):
    kind = "MalformedResponse"


class AuthFailureError(EventlineError):
    kind = "AuthFailure"


class RateLimitedError(EventlineError):
    kind = "RateLimited"


class MalformedUpstreamResponseError(EventlineError):
    kind = "MalformedUpstreamResponse"


class FixtureMissError(EventlineError):
    kind = "FixtureMiss"


# parsing
class NoWindowFoundError(EventlineError):
    kind = "NoWindowFound"


class InvertedIntervalError(EventlineError):
    kind = "InvertedInterval"


class BadNumberError(EventlineError):
    kind = "BadNumber"


# corpus I/O
class IoFailureError(EventlineError):
    kind = "IoFailure"


class SchemaViolationError(EventlineError):
    kind = "SchemaViolation"


class UnknownCategoryError(EventlineError):
    kind = "UnknownCategory"


# frame grids
class BadGeometryError(EventlineError):
    kind = "BadGeometry"


class LabelTooLongError(EventlineError):
    kind = "LabelTooLong"


class CountMismatchError(EventlineError):
    kind = "CountMismatch"


class SizeMismatchError(EventlineError):
    kind = "SizeMismatch"


class TooFewFramesError(EventlineError):
    kind = "TooFewFrames"


# bindings
class UnknownOperationError(EventlineError):
    kind = "UnknownOperation"
