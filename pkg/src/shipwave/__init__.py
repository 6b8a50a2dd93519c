"""Exponentially small gravity waves behind piecewise-linear slow ships.

Asymptotic predictions (Stokes-line geometry, singulant quadrature,
divergence prefactors) for the waves of multi-cornered hulls in the
low-Froude limit, plus two independent numerical solvers of the governing
nonlinear free-surface equations to verify them.
"""

__version__ = "0.1.0"

from .collocation import CollocationGrid, amplitude_full, solve_full, solve_full_continued
from .divergence import DivergenceData, divergence_order, divergence_ratios, omega
from .errors import (
    BranchPointError,
    ConfigError,
    ContourError,
    ConvergenceError,
    HullError,
    MeasurementRejected,
    NoSingulantError,
    QuadratureError,
    ShipwaveError,
    SolverError,
    TraceError,
)
from .hull import (
    Hull,
    HullSpec,
    InnerScaleReport,
    inner_region_scale,
    local_prefactor,
    log_derivative,
    normalize,
    rigid_wall_power,
    rigid_wall_speed,
)
from .simplified import (
    FreeSurfaceSolution,
    SweepPoint,
    SweepResult,
    WaveMeasurement,
    measure_waves,
    solve_simplified,
    sweep_corner,
)
from .singulant import decay_exponent, exponent_integrals, singulant, singulant_derivative
from .stokes import (
    CornerCensus,
    StokesTrace,
    active_corners,
    emergence_angles,
    trace_stokes_line,
)
from .waves import (
    DominanceReport,
    WaveComponent,
    combine_phasors,
    dominance_analysis,
    downstream_amplitude,
    first_order_angle,
    hilbert_angle,
    hilbert_corner_integrals,
    hilbert_exponent,
    hilbert_identity_residual,
    total_wave,
    wave_component,
)

__all__ = [name for name in dir() if not name.startswith("_")]
