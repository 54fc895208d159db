"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when caller-supplied data violates a documented precondition."""


class InvariantViolation(RuntimeError):
    """Raised when an internal consistency check fails (a bug, not bad input)."""
