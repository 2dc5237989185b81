"""Exception types shared across the package."""


class InputError(ValueError):
    """Rejected input: bad parameters, malformed files, degenerate curves."""


class InvariantViolation(RuntimeError):
    """An internal soundness check failed. This is always a bug."""
