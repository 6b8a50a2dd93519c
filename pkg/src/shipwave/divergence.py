"""Late-order divergence data for a single corner.

The asymptotic series driven by a corner of angle fraction sigma diverges
like Gamma(n + gamma) with gamma = 6*sigma/(1+3*sigma).  The constant
multiplying that growth is the limit of phi_n / Gamma(n + gamma), where
phi_n obeys the quadratic recurrence

    phi_0 = 1,
    phi_n = sum_{m=0}^{n-1} (m + 2*sigma/(1+3*sigma)) phi_m phi_{n-m-1}.

phi_n itself overflows doubles near n ~ 170, so the recurrence is iterated
directly on the ratios r_n = phi_n / Gamma(n + gamma) with the Gamma
weights folded in through log-gamma.  The limit is then accelerated with
Richardson extrapolation in 1/n.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import ConvergenceError, NoSingulantError

__all__ = [
    "DivergenceData",
    "divergence_order",
    "divergence_ratios",
    "omega",
    "richardson_limit",
    "aitken_limit",
]


@dataclass(frozen=True)
class DivergenceData:
    """Divergence constants of one corner: exponent, limit ratio, quality."""

    sigma: float
    gamma: float
    omega: float
    n_used: int
    omega_error_est: float


def divergence_order(sigma):
    """Divergence exponent gamma = 6*sigma/(1+3*sigma).

    Exact for exact input types (fractions.Fraction passes through).
    Requires sigma > -1/3.
    """
    if 1 + 3 * sigma <= 0:
        raise NoSingulantError(f"sigma={sigma} <= -1/3 has no divergence exponent")
    return 6 * sigma / (1 + 3 * sigma)


def divergence_ratios(sigma: float, n_max: int) -> np.ndarray:
    """Ratios r_n = phi_n / Gamma(n+gamma) for n = 0..n_max.

    The raw phi_n are never formed; the recurrence is iterated on
    phi_n / Gamma(n + gamma + M) with an integer shift M that keeps every
    Gamma argument away from the poles (needed when gamma <= 0), and the
    result is converted back by the Pochhammer factor.  Only the entries
    with n + gamma > 0 are meaningful after conversion; earlier ones sit
    at representation zeros.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    sigma = float(sigma)
    gamma = float(divergence_order(sigma))
    beta = 2 * sigma / (1 + 3 * sigma)
    shift = 0 if gamma >= 0.5 else int(np.ceil(0.5 - gamma))
    g = gamma + shift
    if g * np.log(max(n_max, 2)) > 600.0:
        raise ConvergenceError(
            f"sigma={sigma} gives divergence exponent {gamma:.3g}; the shifted "
            "ratio representation underflows this close to -1/3"
        )

    lg = gammaln(np.arange(n_max + 1, dtype=float) + g)
    s = np.empty(n_max + 1)
    s[0] = np.exp(-lg[0])
    m_plus_beta = np.arange(n_max) + beta
    for n in range(1, n_max + 1):
        head = lg[:n]
        weights = np.exp(head + head[::-1] - lg[n])
        s[n] = np.dot(m_plus_beta[:n] * weights, s[:n] * s[:n][::-1])
        if not np.isfinite(s[n]):
            raise ConvergenceError(f"ratio recurrence overflowed at n={n} for sigma={sigma}")
    if shift == 0:
        return s
    # r_n = s_n * Gamma(n+g)/Gamma(n+gamma) = s_n * (n+gamma)(n+gamma+1)...(n+g-1)
    r = s.copy()
    for i in range(shift):
        r *= np.arange(n_max + 1, dtype=float) + gamma + i
    return r


def richardson_limit(values: np.ndarray, n: int, levels: int = 3) -> float:
    """Richardson extrapolation in 1/n using values at n, n/2, ..., n/2^levels.

    Assumes values[m] = L + c1/m + c2/m^2 + ...; each level halves the
    index and cancels one more power, with O(1) weights so double-precision
    noise is not amplified.
    """
    if n >> levels < 1:
        raise ValueError("not enough terms for the requested extrapolation depth")
    t = [values[n >> j] for j in range(levels + 1)]  # t[j] at index n/2^j
    for lvl in range(1, levels + 1):
        f = float(2**lvl)
        t = [(f * t[j] - t[j + 1]) / (f - 1.0) for j in range(len(t) - 1)]
    return t[0]


def aitken_limit(values: np.ndarray, rounds: int = 2) -> float:
    """Iterated Aitken delta-squared limit of the tail of a sequence."""
    seq = np.asarray(values, dtype=float)
    for _ in range(rounds):
        if seq.size < 3:
            break
        d1 = seq[1:-1] - seq[:-2]
        d2 = seq[2:] - 2 * seq[1:-1] + seq[:-2]
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = seq[:-2] - d1 * d1 / d2
        good = np.isfinite(nxt)
        if not np.any(good):
            break
        seq = nxt[good]
    return float(seq[-1])


@lru_cache(maxsize=256)
def _omega_cached(sigma: float, tol: float, n_max: int, n_cap: int) -> DivergenceData:
    gamma = float(divergence_order(sigma))
    n = n_max
    while True:
        r = divergence_ratios(sigma, n)
        est = richardson_limit(r, n)
        half = richardson_limit(r, n // 2)
        err = abs(est - half)
        if err < tol:
            break
        if 2 * n > n_cap:
            raise ConvergenceError(
                f"omega(sigma={sigma}) still moving by {err:.3g} at n={n} (tol {tol})"
            )
        n *= 2
    if abs(est) <= 10 * max(err, 1e-300):
        raise ConvergenceError(
            f"omega(sigma={sigma}) indistinguishable from zero at tolerance {tol}"
        )
    return DivergenceData(
        sigma=sigma, gamma=gamma, omega=float(est), n_used=n, omega_error_est=float(err)
    )


def omega(sigma: float, tol: float = 1e-8, n_max: int = 2000, n_cap: int = 16000) -> DivergenceData:
    """Limit ratio of the corner recurrence, with convergence diagnostics.

    Richardson-extrapolates r_n = phi_n/Gamma(n+gamma); the error estimate
    is the gap between the extrapolants at n_max and n_max/2, and n_max is
    doubled (up to n_cap) until that gap drops below ``tol``.  Results are
    cached per (sigma, tol, n_max); the cache is safe under concurrent use.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not -1.0 / 3.0 < sigma < 1.0:
        raise NoSingulantError(f"omega defined for sigma in (-1/3, 1), got {sigma}")
    return _omega_cached(float(sigma), float(tol), int(n_max), int(n_cap))
