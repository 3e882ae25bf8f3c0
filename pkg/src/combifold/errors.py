"""
Exception hierarchy for combifold.

Library code raises these; the CLI and the MCP server translate them into
exit codes and result documents.
"""

from typing import Any, Dict, Optional


class CombifoldError(Exception):
    """Base class for all combifold errors."""


class InputError(CombifoldError, ValueError):
    """
    Malformed input or a violated precondition.

    Attributes:
        field: Optional field path or "line:column" location of the problem
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DimensionError(InputError):
    """A complex is not pure or does not have the requested dimension."""


class BudgetExceededError(CombifoldError):
    """An enumeration ran past its configured budget."""


class RefutedError(CombifoldError):
    """
    A check failed with a concrete witness.

    Attributes:
        verdict: The refuting Verdict (status Refuted, witness attached)
    """

    def __init__(self, message: str, verdict: Any = None):
        self.verdict = verdict
        super().__init__(message)

    @property
    def witness(self) -> Dict[str, Any]:
        if self.verdict is None:
            return {}
        return dict(self.verdict.witness)


class FunctorialityError(RefutedError):
    """Diagram transitions do not compose along some chain p <= q <= r."""


class ConsistencyAlarm(RefutedError):
    """A composite of verified assemblies failed re-verification."""


class UnprovenError(CombifoldError):
    """An Unknown verdict was produced while running in strict mode."""

    def __init__(self, message: str, verdict: Any = None):
        self.verdict = verdict
        super().__init__(message)
