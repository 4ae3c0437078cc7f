"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A model parameter or configuration violates its documented invariants."""


class FeasibilityError(ValueError):
    """A portfolio choice admits a non-positive relative payoff (ruin)."""
