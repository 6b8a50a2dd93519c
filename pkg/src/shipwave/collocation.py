"""Collocation solver for the full nonlinear free-surface system.

The surface angle theta(phi) on phi > 0 satisfies the coupled pair

    log q(phi) = log q_s(phi) + (1/pi) PV int_0^inf theta(p)/(p - phi) dp,
    q^3(phi)   = -(3/eps) int_0^phi sin(theta) dp,        q(0) = 0,

the second being Bernoulli's condition integrated from the stagnation
point.  Unknowns live at midpoint nodes phi_j = (j-1/2)*dphi while the
equations are collocated at the offset points i*dphi, so the principal
value never lands on a quadrature node and the midpoint sums handle it
implicitly.  The discrete system is solved by damped Newton with the
analytic Jacobian; theta is truncated to zero beyond the grid.  Valid at
moderate eps; waves below the 1e-4 reliability floor are refused.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MeasurementRejected, ShipwaveError, SolverError
from .hull import Hull, rigid_wall_power
from .simplified import FreeSurfaceSolution, WaveMeasurement, measure_waves
from .stokes import active_corners
from .waves import first_order_angle

__all__ = [
    "CollocationGrid",
    "solve_full",
    "solve_full_continued",
    "amplitude_full",
    "attachment_angle",
]

RELIABILITY_FLOOR = 1e-4  # smallest trustworthy wave amplitude for this scheme


@dataclass(frozen=True)
class CollocationGrid:
    """Uniform midpoint grid: nodes at (i - 1/2)*dphi, i = 1..n."""

    n: int
    dphi: float

    def __post_init__(self):
        if self.n < 8 or self.dphi <= 0:
            raise ShipwaveError(f"bad collocation grid n={self.n}, dphi={self.dphi}")

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(1, self.n + 1) - 0.5) * self.dphi

    @property
    def collocation_points(self) -> np.ndarray:
        return np.arange(1, self.n + 1) * self.dphi

    @property
    def phi_max(self) -> float:
        return self.n * self.dphi

    def check(self, hull: Hull, eps: float):
        """Warn when the grid under-resolves the wavelength or the domain
        stops short of the far field; the paper's own run parameters break
        the coverage rule, so these are advisory rather than fatal."""
        if self.dphi > eps / 6.0:
            warnings.warn(
                f"dphi={self.dphi} exceeds eps/6={eps / 6:.4g}: fewer than ~10 nodes "
                "per wavelength",
                stacklevel=2,
            )
        census = active_corners(hull)
        hits = [h for h in census.phi_hits if h is not None]
        needed = (max(hits) if hits else 0.0) + 10.0 * 2.0 * np.pi * eps
        if self.phi_max < needed:
            warnings.warn(
                f"grid ends at {self.phi_max:.4g} before the last Stokes hit plus ten "
                f"wavelengths ({needed:.4g}); the measured train may be short",
                stacklevel=2,
            )


def attachment_angle(hull: Hull) -> float:
    """In-fluid wedge angle between the free surface and the last facet."""
    return np.pi * (1.0 + hull.sigma[hull.n])


def solve_full(
    hull: Hull,
    eps: float,
    grid: CollocationGrid,
    newton_tol: float = 1e-10,
    max_iter: int = 40,
    theta0: np.ndarray | None = None,
) -> FreeSurfaceSolution:
    """Damped-Newton solve of the discrete boundary-integral + Bernoulli system.

    ``theta0`` seeds the iteration (continuation from another solution);
    the default seed is the first-order surface angle eps*theta1, which is
    in stride at moderate eps.
    """
    if eps <= 0:
        raise ShipwaveError("eps must be positive")
    grid.check(hull, eps)
    nodes = grid.nodes
    coll = grid.collocation_points
    dphi = grid.dphi
    n = grid.n

    log_qs = np.log(rigid_wall_power(hull, coll, 1.0).real)
    hilbert_matrix = dphi / (np.pi * (nodes[None, :] - coll[:, None]))
    lower = np.tril(np.ones((n, n)))

    # residual in q^3 form: the boundary-integral speed must match the
    # Bernoulli cumulative; no logs, so Newton is free to cross q -> 0
    def pieces(theta):
        q_bie3 = np.exp(3.0 * (log_qs + hilbert_matrix @ theta))
        q_bern3 = -(3.0 / eps) * dphi * np.cumsum(np.sin(theta))
        return q_bie3, q_bern3

    theta = (
        np.array(theta0, dtype=float)
        if theta0 is not None
        else eps * first_order_angle(hull, nodes).real
    )
    if theta.shape != (n,):
        raise ShipwaveError(f"theta seed has shape {theta.shape}, expected ({n},)")

    q_bie3, q_bern3 = pieces(theta)
    r = q_bie3 - q_bern3
    merit = float(r @ r)
    for _ in range(max_iter):
        norm = np.max(np.abs(r))
        if norm < newton_tol:
            break
        jac = 3.0 * q_bie3[:, None] * hilbert_matrix + (3.0 / eps) * dphi * lower * np.cos(theta)[None, :]
        step = np.linalg.solve(jac, -r)
        lam = 1.0
        while lam > 2.0**-30:
            cand = theta + lam * step
            qb3, qn3 = pieces(cand)
            r_new = qb3 - qn3
            m_new = float(r_new @ r_new)
            if m_new < merit:
                theta, q_bie3, q_bern3, r, merit = cand, qb3, qn3, r_new, m_new
                break
            lam *= 0.5
        else:
            raise SolverError(
                f"Newton stagnated at residual {norm:.3g} (tol {newton_tol:.3g}); "
                "seed from a nearby converged solution (continuation in eps)"
            )
    else:
        norm = np.max(np.abs(r))
        raise SolverError(f"no convergence in {max_iter} Newton iterations (residual {norm:.3g})")
    norm = np.max(np.abs(r))
    if np.any(q_bern3 <= 0.0):
        raise SolverError("converged to a profile with non-positive q^3")

    # recover q at the nodes themselves (half-cell cumulative)
    partial = np.concatenate([[0.0], np.cumsum(np.sin(theta))[:-1]])
    q3_nodes = -(3.0 / eps) * dphi * (partial + 0.5 * np.sin(theta))
    if np.any(q3_nodes <= 0.0):
        raise SolverError("non-positive q^3 at nodes after convergence")
    qs_nodes = rigid_wall_power(hull, nodes, 1.0).real
    return FreeSurfaceSolution(
        phi=nodes,
        q=q3_nodes ** (1.0 / 3.0),
        eps=eps,
        theta=theta,
        meta={
            "solver": "collocation",
            "tol": newton_tol,
            "n": n,
            "dphi": dphi,
            "residual": float(norm),
            "rigid_wall_q": qs_nodes,
            "moment1": float(sum(a * s for a, s in zip(hull.a, hull.sigma))),
            "attachment_angle": float(attachment_angle(hull)),
        },
    )


def solve_full_continued(
    hull: Hull,
    eps: float,
    grid: CollocationGrid,
    newton_tol: float = 1e-10,
    eps_start: float = 0.3,
    min_rung: float = 5e-4,
) -> FreeSurfaceSolution:
    """solve_full with adaptive continuation in eps.

    The Newton basin is widest where the waves are weak, so the walk
    starts at a smaller eps with the first-order seed and feeds each
    converged angle field to the next rung; a failed rung is retried at
    half the step.  (Near fold-like spots the rung can shrink a lot.)
    """
    if eps <= eps_start:
        return solve_full(hull, eps, grid, newton_tol=newton_tol)
    max_rung = 0.04  # the discrete branch folds are closely spaced at large eps
    sol = solve_full(hull, eps_start, grid, newton_tol=newton_tol)
    e = eps_start
    de = min(max_rung, eps - e)
    while e < eps:
        target = min(eps, e + de)
        try:
            sol = solve_full(hull, target, grid, newton_tol=newton_tol, theta0=sol.theta)
        except SolverError:
            de *= 0.5
            if de < min_rung:
                raise
            continue
        e = target
        de = min(1.5 * de, max_rung)
    return sol


def amplitude_full(
    hull: Hull,
    eps: float,
    grid: CollocationGrid,
    newton_tol: float = 1e-10,
    theta0: np.ndarray | None = None,
) -> WaveMeasurement:
    """Downstream wave measurement from the full solver.

    Refuses amplitudes under the 1e-4 reliability floor: below that the
    attachment-point error of this scheme swamps the waves.
    """
    if theta0 is None:
        sol = solve_full_continued(hull, eps, grid, newton_tol=newton_tol)
    else:
        sol = solve_full(hull, eps, grid, newton_tol=newton_tol, theta0=theta0)
    meas = measure_waves(sol)
    if meas.amplitude < RELIABILITY_FLOOR:
        raise MeasurementRejected(
            f"amplitude {meas.amplitude:.3g} below the scheme's reliability floor "
            f"{RELIABILITY_FLOOR:g}",
            measurement=meas,
        )
    return meas
