"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to converge or produced an inconsistent value."""


class InternalError(RuntimeError):
    """An invariant that should hold by construction was violated."""
