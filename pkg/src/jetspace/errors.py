"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes: validation problems exit 2,
exhausted resource budgets exit 3, and violated internal invariants exit 4.
"""

from __future__ import annotations


class JetspaceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(JetspaceError, ValueError):
    """Bad input: malformed data, violated preconditions, unknown names."""


class ParseError(ValidationError):
    """Syntax error in a polynomial expression, with a position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BudgetExceededError(JetspaceError, RuntimeError):
    """A configurable resource budget ran out (e.g. Gröbner pair limit).

    Signals that the instance is beyond desk scale, not that it is wrong.
    """


class CertificationError(ValidationError):
    """A randomized construction failed its post-hoc certification battery."""


class InternalInvariantError(JetspaceError, RuntimeError):
    """A theorem-backed consistency check failed; indicates a bug."""
