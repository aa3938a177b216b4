"""Self-similar groups: nucleus computation and simplicial limit-space models."""

from .engine import DEFAULT_BUDGET, IDENTITY, UNDECIDED, EffortBudget, Element, Session
from .errors import (
    BudgetExceeded,
    CertificateFailure,
    ConsistencyError,
    ResourceLimitExceeded,
    RoundLimitExceeded,
    ValidationFailure,
)
from .recursion import (
    InvalidRecursion,
    ParseError,
    WreathRecursion,
    parse_recursion,
    parse_word,
    pretty_print,
)

__all__ = [
    "DEFAULT_BUDGET",
    "IDENTITY",
    "UNDECIDED",
    "BudgetExceeded",
    "CertificateFailure",
    "ConsistencyError",
    "EffortBudget",
    "Element",
    "InvalidRecursion",
    "ParseError",
    "ResourceLimitExceeded",
    "RoundLimitExceeded",
    "Session",
    "ValidationFailure",
    "WreathRecursion",
    "parse_recursion",
    "parse_word",
    "pretty_print",
]
