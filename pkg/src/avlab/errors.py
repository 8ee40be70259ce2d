"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A domain object or input file violates an invariant."""


class UtilityTieError(ValidationError):
    """Utilities are tied where a strict ordering is required."""


class IncompleteConditionsError(ValidationError):
    """A voter's record block is missing one or more required conditions."""
