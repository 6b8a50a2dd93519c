"""Exception hierarchy shared across the package."""


class ShipwaveError(Exception):
    """Base class for all errors raised by this package."""


class HullError(ShipwaveError):
    """Invalid hull geometry (bad corner strengths or angles)."""


class BranchPointError(ShipwaveError):
    """Evaluation requested at a branch point of the rigid-wall flow."""


class NoSingulantError(ShipwaveError):
    """Corner angle at or below the -1/3 threshold: no singulant exists."""


class ContourError(ShipwaveError):
    """Integration contour passes too close to a singularity."""


class QuadratureError(ShipwaveError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ConvergenceError(ShipwaveError):
    """A sequence limit could not be pinned down at the requested tolerance."""


class TraceError(ShipwaveError):
    """Stokes-line march failed; carries the last good partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SolverError(ShipwaveError):
    """Nonlinear solve (ODE march or Newton iteration) failed."""


class MeasurementRejected(ShipwaveError):
    """Wave fit did not meet the acceptance gates; carries the raw fit."""

    def __init__(self, message, measurement=None):
        super().__init__(message)
        self.measurement = measurement


class ConfigError(ShipwaveError):
    """Malformed run configuration or hull file."""
