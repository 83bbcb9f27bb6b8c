"""
Error hierarchy shared by the engine, the CLI and the HTTP API.

Every error carries a machine-readable ``code`` and the process exit code the
CLI maps it to. ``to_dict()`` produces the document printed on failure:
``{"error": code, "message": ..., "details": {...}}``.
"""

from typing import Any, ClassVar


class ArthurkitError(Exception):
    """Base class for all domain errors."""

    code: ClassVar[str] = "arthurkit_error"
    exit_code: ClassVar[int] = 2
    http_status: ClassVar[int] = 400

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


class InvalidInputError(ArthurkitError):
    """Input violates a domain constraint (dimension, order, sign condition...)."""

    code = "invalid_input"


class ParseError(ArthurkitError):
    """Malformed text or JSON input."""

    code = "parse_error"
    exit_code = 64
    http_status = 422

    def __init__(self, message: str, position: int | None = None, **details: Any):
        super().__init__(message, position=position, **details)
        self.position = position


class VanishingError(ArthurkitError):
    """The representation attached to an extended multi-segment is zero."""

    code = "vanishing"


class NotApplicableError(ArthurkitError):
    """An operator was requested where its hypotheses fail."""

    code = "not_applicable"


class BudgetExceededError(ArthurkitError):
    """A search exhausted its node budget."""

    code = "budget_exceeded"
    exit_code = 69
    http_status = 507

    def __init__(self, message: str, budget: int, trail: list[Any] | None = None):
        super().__init__(message, budget=budget, trail=trail or [])
        self.budget = budget
        self.trail = trail or []


class OracleMissError(ArthurkitError):
    """The reducibility oracle has no answer for a query."""

    code = "oracle_miss"


class InvariantViolation(ArthurkitError):
    """An internal consistency hook failed; indicates a bug in the operator layer."""

    code = "invariant_violation"
    exit_code = 70
    http_status = 500
