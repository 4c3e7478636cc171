"""
Engine Errors
=============
Exception hierarchy shared by every engine module.

Each error carries a stable `code` (used in CLI diagnostics and HTTP
responses) and the process `exit_code` the CLI returns for it.
"""

from typing import Any, Optional


class EngineError(Exception):
    """Base class for all engine failures."""

    code = "engine_error"
    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": self.message, **self.details}


# ─── Algebra ───

class ZeroIdealError(EngineError):
    code = "zero_ideal"


class ArityError(EngineError):
    code = "arity_mismatch"


class NegativeExponentError(EngineError):
    code = "negative_exponent"


class ExponentOverflowError(EngineError):
    code = "exponent_overflow"


# ─── Chart forest ───

class ChartNotFoundError(EngineError):
    code = "chart_not_found"


class NotLeafError(EngineError):
    code = "not_leaf"


class InvalidCenterError(EngineError):
    code = "invalid_center"


# ─── Group actions ───

class InconsistentActionError(EngineError):
    code = "inconsistent_action"
    exit_code = 3


class NotInvariantError(EngineError):
    code = "not_invariant"
    exit_code = 3


class EquivarianceBrokenError(EngineError):
    code = "equivariance_broken"
    exit_code = 3


# ─── Algorithms ───

class NothingToDoError(EngineError):
    code = "nothing_to_do"


class PreconditionError(EngineError):
    code = "precondition_failed"


class StageInvariantError(EngineError):
    code = "stage_invariant_failed"
    exit_code = 2


class TerminationGuardError(EngineError):
    """Raised when a blowup loop exceeds its step budget."""

    code = "termination_guard"
    exit_code = 2

    def __init__(self, message: str, trace: Optional[list] = None, **details: Any):
        super().__init__(message, **details)
        self.trace = trace or []

    def to_dict(self) -> dict:
        return {**super().to_dict(), "trace": self.trace}


# ─── I/O ───

class StaleReportError(EngineError):
    code = "stale_report"


class ProblemValidationError(EngineError):
    """Problem file rejected; `diagnostics` lists {path, code, reason}."""

    code = "invalid_problem"

    def __init__(self, message: str, diagnostics: list[dict]):
        super().__init__(message)
        self.diagnostics = diagnostics

    def to_dict(self) -> dict:
        return {**super().to_dict(), "diagnostics": self.diagnostics}
