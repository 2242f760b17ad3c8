"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition or file schema."""


class CapExceededError(RuntimeError):
    """An exhaustive computation would exceed its configured size cap."""


class NoConsistentHypothesis(ValidationError):
    """No hypothesis agrees with the in-group examples of some group."""

    def __init__(self, group_id):
        super().__init__(f"no hypothesis consistent with examples in group {group_id!r}")
        self.group_id = group_id


class NonRealizableFixture(ValidationError):
    """Operation needs a deterministic target but the instance has label noise."""


class InsufficientPositive(ValidationError):
    """Too few grid values with positive median error to fit a rate."""


class InconsistentSample(ValidationError):
    """No concept of the class fits the sample, or the sample contradicts itself."""
