"""Semantic exception hierarchy shared by all modules."""


class OrliczError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(OrliczError, ValueError):
    """Arguments violate a contract: bad kind, shape, class, or range."""


class DomainViolationError(OrliczError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class NumericalFailureError(OrliczError, ArithmeticError):
    """An iterative procedure failed to converge.

    Carries the final residual so callers can report how close the
    computation got.
    """

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class NoSolutionError(OrliczError, ArithmeticError):
    """Bracket expansion ran off to infinity or underflowed.

    Signals that the supplied function violates the limit axioms of its
    declared class.
    """


class DegenerateInputError(OrliczError, ValueError):
    """Inputs are formally valid but make the requested quantity undefined."""
