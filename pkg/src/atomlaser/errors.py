"""Exception types raised by the solvers and the scenario harness."""


class AtomLaserError(Exception):
    """Base class for all package errors."""

    #: short machine-readable tag, printed by the CLI on failure
    code = "error"


class VariantMismatchError(AtomLaserError, TypeError):
    code = "variant-mismatch"


class RangeError(AtomLaserError, OverflowError):
    code = "range"


class AccuracyError(AtomLaserError):
    """Quadrature did not reach its accuracy target."""

    code = "accuracy"

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConvergenceError(AtomLaserError):
    """Grid refinement changed the result by more than the allowed amount."""

    code = "refinement"


class DegenerateRootsError(AtomLaserError):
    code = "degenerate-roots"


class ConsistencyError(AtomLaserError):
    """Two routes to the same quantity disagree."""

    code = "consistency"


class SearchError(AtomLaserError):
    code = "search-failure"


class InfiniteDecayTimeError(AtomLaserError):
    code = "infinite-decay-time"


class StabilityError(AtomLaserError):
    code = "stability"


class DomainEscapeError(AtomLaserError):
    code = "domain-escape"


class ConfigError(AtomLaserError, ValueError):
    code = "config"
