"""Complex-potential contour quadrature for corner-anchored integrals.

Everything this package integrates along contours has the shape

    integral of  pre(w) / q0(w)^3  dw,

where 1/q0^3 = prod_k (w + a_k)^(3*sigma_k) carries an algebraic
singularity (w + a_k)^(3*sigma_k) at every corner and ``pre`` is analytic
off the positive real axis (i for the singulant, 1 for the exponent
integrals, the continued Hilbert transform for the wave corrections).

Contours start (and sometimes end) at a corner.  The leg touching a
corner is integrated with Gauss-Jacobi quadrature against the weight
t^(3*sigma), which handles the endpoint singularity to spectral accuracy;
the rest of the path is adaptive Gauss-Kronrod on straight legs plus
semicircular indentations (into the upper half-plane) over any corner the
path crosses, including the stagnation point where the integrand is not
even locally integrable on the axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import roots_jacobi

from .errors import ContourError, QuadratureError
from .hull import Hull, rigid_wall_power

__all__ = [
    "Contour",
    "default_contour",
    "corner_to_corner_contour",
    "raised_contour",
    "integrate_contour",
]

_JACOBI_CAP = 0.01  # max length of a corner-anchored leg
_ARC_FRACTION = 0.01  # indent radius as a fraction of the minimum corner spacing


@dataclass(frozen=True)
class Contour:
    """Integration path: corner-anchored, straight and arc legs.

    ``legs`` entries are tagged tuples:
      ("jacobi", k, alpha, length, orient)  ray at angle alpha anchored at
          corner k, traversed outward (orient=+1) or inward (orient=-1);
      ("line", z0, z1)                      straight segment;
      ("arc", center, rho, th0, th1)        circular arc about a corner.
    """

    legs: tuple
    indent_radius: float

    @property
    def waypoints(self) -> tuple:
        pts = []
        for leg in self.legs:
            if leg[0] == "line":
                pts.extend([leg[1], leg[2]])
            elif leg[0] == "arc":
                _, c, rho, th0, th1 = leg
                pts.extend([c + rho * np.exp(1j * th0), c + rho * np.exp(1j * th1)])
        # drop consecutive duplicates
        out = []
        for p in pts:
            if not out or abs(p - out[-1]) > 1e-14:
                out.append(p)
        return tuple(out)


def _clearance(hull: Hull, k: int) -> float:
    """Distance from corner k to its nearest neighbour corner."""
    zk = -hull.a[k - 1]
    return min(abs(-a - zk) for j, a in enumerate(hull.a, start=1) if j != k)


def _segment_point_distance(z0: complex, z1: complex, p: complex) -> float:
    d = z1 - z0
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(p - z0)
    t = np.clip(((p - z0) * d.conjugate()).real / L2, 0.0, 1.0)
    return abs(p - (z0 + t * d))


def _validate(hull: Hull, legs, rho: float):
    for leg in legs:
        if leg[0] != "line":
            continue
        _, z0, z1 = leg
        for j, a in enumerate(hull.a, start=1):
            if _segment_point_distance(z0, z1, -a) < 0.99 * rho:
                raise ContourError(
                    f"contour segment {z0:.4g}->{z1:.4g} passes within the indent "
                    f"radius of corner {j} at {-a:.4g}"
                )


def _axis_legs(hull: Hull, x0: float, x1: float, rho: float):
    """Straight march from x0 to x1 on the real axis, arcing over corners."""
    legs = []
    sgn = 1.0 if x1 >= x0 else -1.0
    between = sorted(
        (-a for a in hull.a if min(x0, x1) + rho < -a < max(x0, x1) - rho),
        key=lambda x: sgn * x,
    )
    x = x0
    for xc in between:
        legs.append(("line", complex(x), complex(xc - sgn * rho)))
        th0, th1 = (np.pi, 0.0) if sgn > 0 else (0.0, np.pi)
        legs.append(("arc", complex(xc), rho, th0, th1))
        x = xc + sgn * rho
    legs.append(("line", complex(x), complex(x1)))
    return [leg for leg in legs if leg[0] != "line" or abs(leg[1] - leg[2]) > 1e-15]


def default_contour(hull: Hull, k: int, w, indent_radius: float | None = None) -> Contour:
    """Standard path from corner k to w: hug the axis, arc over corners.

    The first leg is a short corner-anchored ray (Gauss-Jacobi); the path
    then follows the real axis with semicircular indentations over every
    intermediate corner and finishes with a vertical leg when w lies off
    the axis.  Deformations stay in the closed upper half-plane.
    """
    w = complex(w)
    if w.imag < 0:
        raise ContourError("contours are deformed into the upper half-plane only")
    rho = indent_radius if indent_radius is not None else _ARC_FRACTION * hull.min_spacing()
    zk = complex(-hull.a[k - 1])
    d = w - zk
    if abs(d) < 1e-15:
        return Contour(legs=(), indent_radius=rho)
    clear = _clearance(hull, k)
    d0 = min(_JACOBI_CAP, 0.45 * clear)

    # target inside the corner's own clear neighbourhood: one anchored ray
    if abs(d) <= d0:
        return Contour(legs=(("jacobi", k, float(np.angle(d)), abs(d), +1),), indent_radius=rho)

    # target (nearly) straight above the corner: go up, then straight
    if w.imag > 0 and abs(d.real) <= rho:
        lift = min(d0, 0.5 * w.imag)
        legs = [("jacobi", k, np.pi / 2, lift, +1)]
        legs.append(("line", zk + 1j * lift, w))
        _validate(hull, legs, rho)
        return Contour(legs=tuple(legs), indent_radius=rho)

    sgn = 1.0 if d.real >= 0 else -1.0
    legs = [("jacobi", k, 0.0 if sgn > 0 else np.pi, d0, +1)]
    x = zk.real + sgn * d0
    if w.imag == 0.0:
        for j, a in enumerate(hull.a, start=1):
            if j != k and abs(w.real + a) < rho:
                raise ContourError(
                    f"target {w:.4g} lies within the indent radius of corner {j}"
                )
        legs.extend(_axis_legs(hull, x, w.real, rho))
    else:
        x_lift = w.real
        conflict = min(abs(w.real + a) for a in hull.a)
        if conflict < 1.5 * rho:
            if w.imag < 1.5 * rho:
                raise ContourError(f"target {w:.4g} too close to a corner indent")
            x_lift = w.real - sgn * 1.5 * rho
        legs.extend(_axis_legs(hull, x, x_lift, rho))
        legs.append(("line", complex(x_lift), w))
    legs = [leg for leg in legs if leg[0] != "line" or abs(leg[1] - leg[2]) > 1e-15]
    _validate(hull, legs, rho)
    return Contour(legs=tuple(legs), indent_radius=rho)


def corner_to_corner_contour(
    hull: Hull, k_from: int, k_to: int, indent_radius: float | None = None
) -> Contour:
    """Path between two corners, Gauss-Jacobi anchored at both ends."""
    if k_from == k_to:
        return Contour(legs=(), indent_radius=0.0)
    rho = indent_radius if indent_radius is not None else _ARC_FRACTION * hull.min_spacing()
    z0 = -hull.a[k_from - 1]
    z1 = -hull.a[k_to - 1]
    sgn = 1.0 if z1 >= z0 else -1.0
    d0 = min(_JACOBI_CAP, 0.45 * _clearance(hull, k_from))
    d1 = min(_JACOBI_CAP, 0.45 * _clearance(hull, k_to))
    legs = [("jacobi", k_from, 0.0 if sgn > 0 else np.pi, d0, +1)]
    legs.extend(_axis_legs(hull, z0 + sgn * d0, z1 - sgn * d1, rho))
    legs.append(("jacobi", k_to, np.pi if sgn > 0 else 0.0, d1, -1))
    _validate(hull, legs, rho)
    return Contour(legs=tuple(legs), indent_radius=rho)


def lifted_corner_to_corner(
    hull: Hull, k_from: int, k_to: int, height: float = 0.75
) -> Contour:
    """Corner-to-corner path lifted over the hull: up, across, and down.

    Equivalent to the axis-hugging path by analyticity, but every
    evaluation between the two anchored legs stays a height away from the
    corner singularities, which conditions the quadrature much better when
    intermediate corners carry negative angles.
    """
    if k_from == k_to:
        return Contour(legs=(), indent_radius=0.0)
    rho = _ARC_FRACTION * hull.min_spacing()
    z0 = -hull.a[k_from - 1]
    z1 = -hull.a[k_to - 1]
    h = max(height, 4 * rho)
    d0 = min(_JACOBI_CAP, 0.45 * _clearance(hull, k_from), 0.5 * h)
    d1 = min(_JACOBI_CAP, 0.45 * _clearance(hull, k_to), 0.5 * h)
    legs = [
        ("jacobi", k_from, np.pi / 2, d0, +1),
        ("line", z0 + 1j * d0, z0 + 1j * h),
        ("line", z0 + 1j * h, z1 + 1j * h),
        ("line", z1 + 1j * h, z1 + 1j * d1),
        ("jacobi", k_to, np.pi / 2, d1, -1),
    ]
    legs = [leg for leg in legs if leg[0] != "line" or abs(leg[1] - leg[2]) > 1e-15]
    _validate(hull, legs, rho)
    return Contour(legs=tuple(legs), indent_radius=rho)


def raised_contour(hull: Hull, k: int, w, height: float = 0.75) -> Contour:
    """Alternate admissible path: leave the corner vertically, cross high up.

    Used to exercise path independence; shares no interior points with the
    default contour.
    """
    w = complex(w)
    if w.imag < 0:
        raise ContourError("contours are deformed into the upper half-plane only")
    rho = _ARC_FRACTION * hull.min_spacing()
    zk = complex(-hull.a[k - 1])
    h = max(height, 2 * w.imag, 4 * rho)
    d0 = min(_JACOBI_CAP, 0.45 * _clearance(hull, k), 0.5 * h)
    legs = [
        ("jacobi", k, np.pi / 2, d0, +1),
        ("line", zk + 1j * d0, zk + 1j * h),
        ("line", zk + 1j * h, complex(w.real, h)),
        ("line", complex(w.real, h), w),
    ]
    legs = [leg for leg in legs if leg[0] != "line" or abs(leg[1] - leg[2]) > 1e-15]
    _validate(hull, legs, rho)
    return Contour(legs=tuple(legs), indent_radius=rho)


@lru_cache(maxsize=64)
def _jacobi_rule(n: int, beta: float):
    x, wts = roots_jacobi(n, 0.0, beta)
    return x, wts


def _jacobi_leg(hull, k, alpha, length, orient, pre, tol):
    """Integral of pre(w)/q0(w)^3 along the anchored ray, outward orientation.

    Substituting w = -a_k + t e^{i alpha} pulls out t^(3 sigma_k); the
    remaining factor is analytic along the leg and is resolved by a
    doubling Gauss-Jacobi ladder.
    """
    beta = 3.0 * hull.sigma[k - 1]
    zk = -hull.a[k - 1]
    phase = np.exp(1j * alpha * (1.0 + beta))

    def smooth(t):
        w = zk + t * np.exp(1j * alpha)
        return pre(w) * rigid_wall_power(hull, w, -3.0, skip=k)

    prev = None
    change = np.inf
    for n in (24, 48, 96):
        x, wts = _jacobi_rule(n, beta)
        t = length * (x + 1.0) / 2.0
        vals = np.array([smooth(ti) for ti in t])
        est = (length / 2.0) ** (beta + 1.0) * phase * np.sum(wts * vals)
        if prev is not None:
            change = abs(est - prev)
            if change <= max(tol, 1e-15 * abs(est)):
                return orient * est, change
        prev = est
    raise QuadratureError(
        f"corner-anchored leg at corner {k} did not settle (last change "
        f"{change:.3g}, tol {tol:.3g})"
    )


def _quad_complex(fn, tol, rel):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        re, re_err = quad(lambda t: fn(t).real, 0.0, 1.0, epsabs=tol, epsrel=rel, limit=250)
        im, im_err = quad(lambda t: fn(t).imag, 0.0, 1.0, epsabs=tol, epsrel=rel, limit=250)
    return complex(re, im), re_err + im_err


def integrate_contour(
    hull: Hull, contour: Contour, pre, quad_tol: float = 1e-10, rel_tol: float = 1e-11
) -> complex:
    """Integrate pre(w)/q0(w)^3 along the contour to absolute error quad_tol."""
    if not contour.legs:
        return 0.0 + 0.0j
    leg_tol = quad_tol / (2.0 * len(contour.legs))
    total = 0.0 + 0.0j
    err = 0.0
    for leg in contour.legs:
        if leg[0] == "jacobi":
            _, k, alpha, length, orient = leg
            val, e = _jacobi_leg(hull, k, alpha, length, orient, pre, leg_tol)
        elif leg[0] == "line":
            _, z0, z1 = leg
            dz = z1 - z0

            def fn(t, z0=z0, dz=dz):
                w = z0 + t * dz
                return pre(w) * rigid_wall_power(hull, w, -3.0) * dz

            val, e = _quad_complex(fn, leg_tol, rel_tol)
        elif leg[0] == "arc":
            _, c, rho, th0, th1 = leg
            dth = th1 - th0

            def fn(t, c=c, rho=rho, th0=th0, dth=dth):
                th = th0 + t * dth
                z = c + rho * np.exp(1j * th)
                return pre(z) * rigid_wall_power(hull, z, -3.0) * 1j * rho * np.exp(1j * th) * dth

            val, e = _quad_complex(fn, leg_tol, rel_tol)
        else:
            raise ContourError(f"unknown leg tag {leg[0]!r}")
        total += val
        err += e
    if err > 50.0 * quad_tol:
        raise QuadratureError(
            f"contour quadrature error estimate {err:.3g} exceeds budget for tol {quad_tol:.3g}"
        )
    return total
