"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range argument."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""


class CapacityError(RuntimeError):
    """Requested computation exceeds a configured size guard."""
