"""Shared error types for budget, resource and consistency failures."""


class BudgetExceeded(Exception):
    """A computation did not finish within the configured effort budget.

    Signals "undecided", never a wrong answer; typical causes are a
    non-contracting recursion or a budget that is too small.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class RoundLimitExceeded(Exception):
    """Nucleus saturation was still growing after the allowed rounds."""


class ResourceLimitExceeded(Exception):
    """A requested level or candidate space is too large to materialize."""


class ConsistencyError(Exception):
    """An internal cross-check failed; indicates a bug, not a valid state."""


class ValidationFailure(Exception):
    """Cross-validation between two construction routes found a mismatch."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class CertificateFailure(Exception):
    """A contraction-certificate containment check failed."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
