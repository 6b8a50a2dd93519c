"""Stokes-line geometry: emergence angles, tracing, and the active set.

A Stokes line of corner k is the locus Im chi_k = 0, Re chi_k >= 0
emanating from w = -a_k.  Waves switch on where such a line crosses the
free surface (the positive real axis), so the set of corners whose lines
reach the free surface — the active set — determines which corners
contribute waves.  Emergence angles follow from the local form of the
singulant; whether a line actually reaches the free surface is a global
question answered here by marching the line numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contour import _ARC_FRACTION
from .errors import NoSingulantError, TraceError
from .hull import Hull, rigid_wall_power
from .singulant import _require_singulant, singulant

__all__ = [
    "StokesTrace",
    "CornerCensus",
    "emergence_angles",
    "trace_stokes_line",
    "active_corners",
]

FREE_SURFACE_HIT = "free-surface-hit"
ESCAPED = "escaped"
HIT_SINGULARITY = "hit-singularity"
STEP_LIMIT = "step-limit"


@dataclass(frozen=True)
class StokesTrace:
    """One marched Stokes line with its singulant history and fate."""

    corner: int
    emergence_angle: float
    points: np.ndarray
    chi_along: np.ndarray
    termination: str
    phi_hit: float | None = None
    hit_corner: int | None = None
    note: str = ""

    @property
    def hit_free_surface(self) -> bool:
        return self.termination == FREE_SURFACE_HIT


@dataclass(frozen=True)
class CornerCensus:
    """Per-corner Stokes-line outcome for a hull.

    status is one of 'active' (a line reaches the free surface),
    'inactive' (lines exist but none reaches it), 'no-singulant', or
    'undetermined' (a march failed; never silently treated as inactive).
    """

    statuses: tuple[str, ...]
    phi_hits: tuple[float | None, ...]
    traces: tuple[tuple[StokesTrace, ...], ...]

    @property
    def active(self) -> frozenset[int]:
        return frozenset(
            k for k, s in enumerate(self.statuses, start=1) if s == "active"
        )

    @property
    def undetermined(self) -> frozenset[int]:
        return frozenset(
            k for k, s in enumerate(self.statuses, start=1) if s == "undetermined"
        )

    def phi_hit(self, k: int) -> float | None:
        return self.phi_hits[k - 1]


def emergence_angles(hull: Hull, k: int) -> tuple[float, ...]:
    """Angles in (0, pi) at which Stokes lines leave corner k.

    These are nu = (3*theta_k + 2*m*pi - pi/2)/(1+3*sigma_k) over integer
    m, restricted to the upper half-plane; an empty result means no line
    enters the upper half-plane from this corner.
    """
    _require_singulant(hull, k)
    s = hull.sigma[k - 1]
    th = hull.theta[k - 1]
    denom = 1.0 + 3.0 * s
    base = 3.0 * th - 0.5 * np.pi
    # 0 < (base + 2 m pi)/denom < pi with denom > 0
    m_lo = int(np.floor(-base / (2 * np.pi))) - 1
    m_hi = int(np.ceil((np.pi * denom - base) / (2 * np.pi))) + 1
    out = []
    for m in range(m_lo, m_hi + 1):
        nu = (base + 2.0 * np.pi * m) / denom
        if 0.0 < nu < np.pi:
            out.append(nu)
    return tuple(sorted(out))


def _chi_rate(hull: Hull, w):
    return 1j * rigid_wall_power(hull, w, -3.0)


def trace_stokes_line(
    hull: Hull,
    k: int,
    nu: float,
    *,
    r0: float = 1e-4,
    r_max: float = 50.0,
    max_steps: int = 100_000,
    trace_tol: float = 1e-9,
    chi_step: float = 0.02,
    indent_radius: float | None = None,
) -> StokesTrace:
    """March the Stokes line of corner k leaving at angle nu.

    Each step advances the singulant by a controlled real increment
    (the step direction -i q0^3/|q0^3| makes d(chi) real positive), then a
    transverse Newton correction pins |Im chi| below ``trace_tol``.  The
    march ends on a free-surface crossing, on leaving the relevant domain
    (|w| > r_max, or dropping through the hull side of the axis), on
    running into another corner, or at the step limit.
    """
    rho = indent_radius if indent_radius is not None else _ARC_FRACTION * hull.min_spacing()
    zk = -hull.a[k - 1]
    r0 = min(r0, 0.05 * hull.min_spacing())
    w = zk + r0 * np.exp(1j * nu)
    chi = singulant(hull, k, w)
    pts = [w]
    chis = [chi]
    positions = [-a for a in hull.a]
    left_home = False

    def finish(termination, phi_hit=None, hit_corner=None, note=""):
        return StokesTrace(
            corner=k,
            emergence_angle=nu,
            points=np.array(pts),
            chi_along=np.array(chis),
            termination=termination,
            phi_hit=phi_hit,
            hit_corner=hit_corner,
            note=note,
        )

    for _ in range(max_steps):
        f = _chi_rate(hull, w)
        dist = min(abs(w - p) for p in positions)
        h = min(chi_step * max(1.0, 0.2 * abs(w)), 0.25 * dist * abs(f))
        ok = False
        for _attempt in range(12):
            dw0 = h / f
            fm = _chi_rate(hull, w + 0.5 * dw0)
            dw = h / fm
            w_new = w + dw
            f_new = _chi_rate(hull, w_new)
            chi_new = chi + dw * (f + 4.0 * _chi_rate(hull, w + 0.5 * dw) + f_new) / 6.0
            # transverse Newton: push Im chi back to zero
            converged = False
            for _newton in range(8):
                if abs(chi_new.imag) < 0.5 * trace_tol:
                    converged = True
                    break
                u = 1j * dw / abs(dw)
                slope = (f_new * u).imag
                if slope == 0.0 or not np.isfinite(slope):
                    break
                s = -chi_new.imag / slope
                if abs(s) > 0.5 * abs(dw):
                    break
                w_new += s * u
                f_new = _chi_rate(hull, w_new)
                chi_new += f_new * s * u
            if converged:
                ok = True
                break
            h *= 0.5
            if h < 1e-13:
                break
        if not ok:
            raise TraceError(
                f"corrector failed to hold Im chi below {trace_tol} near w={w:.6g}",
                trace=finish(STEP_LIMIT, note="corrector divergence"),
            )

        # free-surface or hull-axis crossing
        if w_new.imag <= 0.0 < w.imag:
            t = w.imag / (w.imag - w_new.imag)
            xc = (w + t * (w_new - w)).real
            pts.append(complex(xc, 0.0))
            chis.append(chi_new)
            if xc > 0.0:
                return finish(FREE_SURFACE_HIT, phi_hit=float(xc))
            return finish(
                ESCAPED,
                note=f"left the upper half-plane through the hull axis at phi={xc:.6g}",
            )

        pts.append(w_new)
        chis.append(chi_new)
        if abs(w_new) > r_max:
            return finish(ESCAPED, note=f"|w| exceeded r_max={r_max}")
        if not left_home and abs(w_new - zk) > 3.0 * rho:
            left_home = True
        for j, p in enumerate(positions, start=1):
            if j == k and not left_home:
                continue
            if abs(w_new - p) < rho:
                return finish(HIT_SINGULARITY, hit_corner=j)
        w, chi = w_new, chi_new

    return finish(STEP_LIMIT, note=f"no termination within {max_steps} steps")


@lru_cache(maxsize=64)
def _census_cached(hull: Hull) -> CornerCensus:
    statuses = []
    hits = []
    all_traces = []
    for k in hull.corners:
        if not hull.has_singulant(k):
            statuses.append("no-singulant")
            hits.append(None)
            all_traces.append(())
            continue
        nus = emergence_angles(hull, k)
        traces = []
        failed = False
        for nu in nus:
            try:
                traces.append(trace_stokes_line(hull, k, nu))
            except TraceError as exc:
                failed = True
                if exc.trace is not None:
                    traces.append(exc.trace)
        hit = next((t for t in traces if t.hit_free_surface), None)
        unresolved = failed or any(t.termination == STEP_LIMIT for t in traces)
        if hit is not None:
            statuses.append("active")
            hits.append(hit.phi_hit)
        elif unresolved:
            statuses.append("undetermined")
            hits.append(None)
        else:
            statuses.append("inactive")
            hits.append(None)
        all_traces.append(tuple(traces))
    return CornerCensus(statuses=tuple(statuses), phi_hits=tuple(hits), traces=tuple(all_traces))


def active_corners(hull: Hull) -> CornerCensus:
    """Trace every corner's Stokes lines and classify the corners.

    The free-surface intersection is decided by marching, never by the
    emergence condition alone.  Corners whose march fails are reported as
    'undetermined' rather than silently dropped.  Results are cached per
    hull; traces for different corners are independent.
    """
    return _census_cached(hull)
