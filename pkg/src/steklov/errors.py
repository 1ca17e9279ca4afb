"""Exception hierarchy shared by all modules."""


class SteklovError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SteklovError, ValueError):
    """An argument lies outside the region where a formula is valid."""


class PoleError(DomainError):
    """Quantity evaluated at the pole r = 0, where it diverges."""


class BracketError(SteklovError, ValueError):
    """Root-finding bracket without a sign change."""


class ConvergenceError(SteklovError, RuntimeError):
    """An iterative method did not reach its tolerance.

    ``best`` carries the last estimate, ``trace`` any iteration history.
    """

    def __init__(self, message, best=None, trace=None):
        super().__init__(message)
        self.best = best
        self.trace = trace if trace is not None else []


class ConditioningError(SteklovError, ArithmeticError):
    """Matrix is not positive definite or is numerically singular."""


class InvalidModelError(SteklovError, ValueError):
    """Ill-formed ambient model (e.g. non-positive warp)."""


class GeometryError(SteklovError, ValueError):
    """Domain fails a geometric precondition such as star-shapedness."""


class HypothesisError(SteklovError, ValueError):
    """A theorem hypothesis (e.g. a curvature bound) does not hold."""


class UnsupportedOperationError(SteklovError, NotImplementedError):
    """Operation not available for this ambient model."""
