"""Shared exception types."""


class DomainError(ValueError):
    """Input outside the supported parameter domain."""


class HypothesisError(ValueError):
    """A construction's arithmetic hypotheses are not satisfied."""


class PrecisionError(ArithmeticError):
    """A certified bound came within the safety margin of the carried
    Teichmuller precision; the audit aborts instead of mis-certifying."""


class IndeterminateCancellation(ArithmeticError):
    """Several symbol degrees tie at the minimal valuation, so the bound
    cannot be promoted to an exact statement."""


class DimensionBoundError(ValueError):
    """A brute-force module exceeds the configured dimension bound."""
