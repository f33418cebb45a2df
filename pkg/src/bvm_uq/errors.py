"""Exception types shared across the package."""


class BvmUqError(Exception):
    """Base class for all package errors."""


class GridMismatchError(BvmUqError):
    """Two grid functions do not live on the same grid."""


class CoefficientError(BvmUqError):
    """A conductivity field is nonpositive (or out of range) somewhere."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class SolverConvergenceError(BvmUqError):
    """The iterative solver did not reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DomainError(BvmUqError):
    """A point or parameter lies outside its admissible domain."""


class AliasingError(BvmUqError):
    """Spectral truncation exceeds what the grid can represent."""


class ChainQualityError(BvmUqError):
    """An MCMC run failed its quality thresholds."""


class TuningError(BvmUqError):
    """Step-size tuning ended pinned at an acceptance extreme."""


class ConfigError(BvmUqError):
    """An experiment configuration failed validation."""
