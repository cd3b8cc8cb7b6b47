"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a hypothesis required by the operation."""


class TheoremViolation(RuntimeError):
    """A proven inequality or existence statement failed numerically.

    This always indicates an implementation bug (or a tolerance set too
    tight), never a legitimate experimental outcome.
    """
