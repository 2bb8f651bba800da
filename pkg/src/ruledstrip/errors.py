"""Exception hierarchy shared by all modules."""


class RuledStripError(Exception):
    """Base class for all package errors."""


class DomainError(RuledStripError, ValueError):
    """A point lies outside the strip ``R x (-a, a)``."""


class PreconditionError(RuledStripError, ValueError):
    """Invalid numeric input (non-positive size, bad grid, ...)."""


class HypothesisError(RuledStripError):
    """A standing geometric hypothesis is violated."""


class NoCertificateError(HypothesisError):
    """The Hardy weight vanishes on every sampled interval."""


class InfeasibleEnvelopeError(HypothesisError):
    """The curvature envelope is too large for the ratio bounds to exist."""


class UnsupportedGeometryError(HypothesisError):
    """The curve data cannot produce a Frenet frame."""


class ConfigError(RuledStripError, ValueError):
    """Malformed geometry or run configuration."""


class SolverError(RuledStripError):
    """An eigensolver did not reach the requested residual."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class QuadratureError(RuledStripError):
    """Quadrature failed to converge to the requested accuracy."""


class InconsistencyError(RuledStripError):
    """Internal cross-check failed (should never happen for valid inputs)."""
