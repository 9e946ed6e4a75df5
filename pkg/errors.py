"""
Exception hierarchy for the approximation lab.
Each error carries the CLI exit code it maps to.
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for every error the lab raises on purpose."""

    exit_code: int = 1
    kind: str = "lab_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form written to error.json."""
        return {
            "type": self.kind,
            "message": self.message,
            "details": self.details,
            "exit_code": self.exit_code,
        }


class ValidationError(LabError):
    """Bad parameters, out-of-range profile values, missing options."""

    exit_code = 2
    kind = "validation"

    @classmethod
    def from_pydantic(cls, exc, context: str) -> "ValidationError":
        """Collapse a pydantic error into one report listing every failing field."""
        problems = [
            f"{'.'.join(str(p) for p in err['loc']) or context}: {err['msg']}"
            for err in exc.errors()
        ]
        return cls(f"Invalid {context}: " + "; ".join(problems), {"problems": problems})


class DegenerateInputError(ValidationError):
    """Input for which the requested quantity is undefined (e.g. 0/0)."""

    kind = "degenerate_input"


class CapacityError(LabError):
    """Request exceeds a table limit or the configured sieve ceiling."""

    exit_code = 3
    kind = "capacity"


class BudgetError(LabError):
    """Work estimate exceeds a configured budget."""

    exit_code = 3
    kind = "budget"

    def __init__(self, message: str, required: Any = None, budget: Any = None):
        super().__init__(message, {"required": required, "budget": budget})
        self.required = required
        self.budget = budget


class ConsistencyError(LabError):
    """Two independent computations disagree: a bug, not bad input."""

    exit_code = 4
    kind = "internal_consistency"


class InternalError(LabError):
    """Unexpected failure outside the lab's own error classes."""

    exit_code = 4
    kind = "internal"
