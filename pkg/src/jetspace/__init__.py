"""Exact jet-space computations for algebraic varieties over Q."""

from .errors import (
    BudgetExceededError,
    CertificationError,
    InternalInvariantError,
    JetspaceError,
    ParseError,
    ValidationError,
)

__all__ = [
    "BudgetExceededError",
    "CertificationError",
    "InternalInvariantError",
    "JetspaceError",
    "ParseError",
    "ValidationError",
]

__version__ = "0.1.0"
