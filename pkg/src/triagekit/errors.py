"""Exception hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` (used by the HTTP
layer and the CLI exit mapping) plus a human message. Validation errors
that can report several violations at once carry a ``violations`` list.
"""

from __future__ import annotations


class TriageError(Exception):
    """Base class for all domain errors."""

    code = "TriageError"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> dict:
        payload = {"code": self.code, "message": self.message}
        if self.field is not None:
            payload["field"] = self.field
        return payload


class Violation:
    """One schema/ticket rule violation inside a multi-error report."""

    __slots__ = ("code", "field", "message")

    def __init__(self, code: str, field: str, message: str):
        self.code = code
        self.field = field
        self.message = message

    def to_dict(self) -> dict:
        return {"code": self.code, "field": self.field, "message": self.message}

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Violation({self.code}, {self.field}: {self.message})"


class SchemaValidationError(TriageError):
    """Raised with *every* violation found, not just the first."""

    code = "SchemaValidation"

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "violations": [v.to_dict() for v in self.violations],
        }


class TicketRejected(TriageError):
    """A ticket failed validation; ``code`` names the first failing rule."""

    def __init__(self, code: str, message: str, field: str | None = None):
        super().__init__(message, field)
        self.code = code


# --- single-condition errors, one class per spec code -------------------

class EmptyText(TriageError):
    code = "EmptyText"


class MissingIdfTable(TriageError):
    code = "MissingIdfTable"


class EmptyCorpus(TriageError):
    code = "EmptyCorpus"


class UnknownFilterField(TriageError):
    code = "UnknownFilterField"


class InvalidDateRange(TriageError):
    code = "InvalidDateRange"


class MalformedThresholds(TriageError):
    code = "MalformedThresholds"


class UnknownTicket(TriageError):
    code = "UnknownTicket"


class TooFewLabels(TriageError):
    code = "TooFewLabels"


class TooFewExamples(TriageError):
    code = "TooFewExamples"


class UnknownLabel(TriageError):
    code = "UnknownLabel"


class DuplicateEventId(TriageError):
    code = "DuplicateEventId"


class BadBandwidth(TriageError):
    code = "BadBandwidth"


class RankTooLarge(TriageError):
    code = "RankTooLarge"


class BadHyperparameters(TriageError):
    code = "BadHyperparameters"


class UnknownTagField(TriageError):
    code = "UnknownTagField"


class UnknownPhrase(TriageError):
    code = "UnknownPhrase"


class HoldoutTooSmall(TriageError):
    code = "HoldoutTooSmall"


class ConstantSeries(TriageError):
    code = "ConstantSeries"


class LengthMismatch(TriageError):
    code = "LengthMismatch"


class UnreadableSource(TriageError):
    code = "UnreadableSource"


class MissingColumn(TriageError):
    code = "MissingColumn"


class EmptyAfterQuarantine(TriageError):
    code = "EmptyAfterQuarantine"


class UnknownVersion(TriageError):
    code = "UnknownVersion"


class HashMismatch(TriageError):
    code = "HashMismatch"


class FormatVersionMismatch(TriageError):
    """A persisted artifact was written by an incompatible format version."""

    code = "FormatVersionMismatch"


class ConcurrentJob(TriageError):
    """An exclusive job (ingest/train) is already running for this kind."""

    code = "ConcurrentJob"
