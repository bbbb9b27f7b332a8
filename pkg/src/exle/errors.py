"""Exception vocabulary shared across the package.

Each class maps to one CLI exit code; keeping them distinct lets callers
tell an invalid exponent pair apart from a solver that ran out of budget.
"""

from __future__ import annotations


class ExleError(Exception):
    """Base class for all package errors."""


class DomainError(ExleError, ValueError):
    """Input outside the mathematical domain (bad exponents, bad dimension)."""


class ConfigurationError(ExleError, ValueError):
    """Structurally invalid configuration (grid too coarse, bad config key)."""


class NumericalError(ExleError, RuntimeError):
    """A numerical guarantee failed (no bracket, broken maximum principle)."""


class BudgetError(ExleError, RuntimeError):
    """Iteration or step budget exhausted.  Carries partial results."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class DiagnosticError(ExleError, RuntimeError):
    """A diagnostic was requested on data that cannot support it."""
