"""Exception types raised across the library."""


class PointTomoError(Exception):
    """Base class for all library errors."""


class InvalidInput(PointTomoError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInput(PointTomoError, ValueError):
    """Input is structurally valid but numerically unusable (e.g. rank
    deficient matrix, all probabilities below the floor)."""


class ConsistencyError(PointTomoError, RuntimeError):
    """An internal quantity violates an invariant it should satisfy by
    construction (e.g. a Born probability that is significantly negative)."""


class NumericalError(PointTomoError, RuntimeError):
    """A numerical operation cannot be carried out reliably (e.g. inverting
    an ill-conditioned information matrix)."""


class SweepError(PointTomoError, RuntimeError):
    """A Monte Carlo sweep aborted; carries the partial result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
