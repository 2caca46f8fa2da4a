"""Exception types shared across the laboratory."""


class DimensionError(ValueError):
    """A vector or block does not match the operator dimension."""


class SizeError(ValueError):
    """A dense materialization would exceed the configured cap."""


class ValidationError(ValueError):
    """Parameters violate a construction's admissible range."""


class SingularError(ArithmeticError):
    """A resolvent system is numerically singular."""


class ConvergenceError(RuntimeError):
    """An iterative estimate did not reach the requested residual.

    Carries the best estimate seen so far together with the residual it
    achieved, so callers can keep partial results.
    """

    def __init__(self, message, best=None, residual=None, iterations=None, partial=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.iterations = iterations
        self.partial = partial
