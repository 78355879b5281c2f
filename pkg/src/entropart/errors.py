"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a documented precondition of an operation."""


class DegeneratePartitionError(PreconditionError):
    """A partition contains a zero-volume bin where positive volume is required."""
