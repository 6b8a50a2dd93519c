"""Singulants: the exponents controlling each corner's wave switching.

The singulant of corner k is

    chi_k(w) = integral from -a_k to w of  i / q0(phi)^3  dphi,

taken along any contour in the closed upper half-plane that avoids the
other corners.  Its real part on the free surface sets how exponentially
small the corner's wave is; its imaginary part sets the phase.  The
integrand behaves like (w+a_k)^(3*sigma_k) at the anchor, so a singulant
exists only for sigma_k > -1/3.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np

from .contour import Contour, default_contour, integrate_contour, lifted_corner_to_corner
from .errors import NoSingulantError
from .hull import Hull, rigid_wall_power

__all__ = [
    "singulant",
    "singulant_derivative",
    "decay_exponent",
    "exponent_integrals",
]


def _require_singulant(hull: Hull, k: int):
    s = hull.sigma[k - 1]
    if s == -1.0 / 3.0:
        warnings.warn(
            f"corner {k} sits exactly on the sigma=-1/3 boundary; treated as "
            "having no singulant",
            stacklevel=3,
        )
    if s <= -1.0 / 3.0:
        raise NoSingulantError(
            f"corner {k} has sigma={s} <= -1/3: the singulant integral diverges"
        )
    if s == 0.0:
        raise NoSingulantError(f"corner {k} has sigma=0: no singularity there")


def singulant(hull: Hull, k: int, w, contour: Contour | None = None, quad_tol: float = 1e-10) -> complex:
    """chi_k(w) by contour quadrature; chi_k(-a_k) = 0.

    A default axis-hugging contour is built when none is supplied.
    """
    _require_singulant(hull, k)
    if contour is None:
        contour = default_contour(hull, k, w)
    return integrate_contour(hull, contour, lambda _w: 1j, quad_tol=quad_tol)


def singulant_derivative(hull: Hull, w):
    """d(chi_k)/dw = i/q0^3, identical for every corner."""
    return 1j * rigid_wall_power(hull, w, -3.0)


def decay_exponent(hull: Hull) -> float:
    """Re(chi_1) anywhere on the free surface: 3*pi*sum(a_k*sigma_k).

    The real part of the upstream singulant is constant on the positive
    real axis; it is the residue contribution of the pole at infinity and
    controls the e^(-const/eps) smallness of every downstream wave.
    """
    return 3.0 * np.pi * sum(a * s for a, s in zip(hull.a[: hull.n], hull.sigma[: hull.n]))


@lru_cache(maxsize=128)
def _exponent_integrals_cached(hull: Hull, quad_tol: float) -> tuple:
    out = [0.0 + 0.0j]
    for k in range(2, hull.n + 2):
        if hull.sigma[k - 1] <= -1.0 / 3.0:
            out.append(None)  # integrand not integrable at the target corner
            continue
        path = lifted_corner_to_corner(hull, 1, k)
        out.append(integrate_contour(hull, path, lambda _w: 1.0 + 0.0j, quad_tol=quad_tol))
    return tuple(out)


def exponent_integrals(hull: Hull, quad_tol: float = 1e-10) -> tuple:
    """Integrals I_k from -a_1 to -a_k of dphi/q0^3, for k = 1..N+1.

    These relate every singulant to the upstream one,
    chi_k = chi_1 - i*I_k, so Im(I_k) separates the corners' exponential
    orders and Re(I_k) their phase offsets.  Entries are None for corners
    whose local exponent makes the integral divergent (sigma <= -1/3).
    Cached per hull.
    """
    return _exponent_integrals_cached(hull, float(quad_tol))
