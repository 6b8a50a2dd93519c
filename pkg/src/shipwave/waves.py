"""Wave predictions: Hilbert corrections, per-corner amplitudes, dominance.

Each active corner k switches on a downstream wave

    A_k(w) * exp(-Re(chi_k)/eps) * cos(-Im(chi_k)/eps + phase_k),

whose coefficient assembles the local divergence data (gamma_k, the
recurrence limit), the local prefactor |c_k|, and — in the full model — a
correction from the Hilbert transform of the first-order streamline
angle.  The simplified model drops the Hilbert terms, halves the leading
constant (no conjugate contribution) and drops the pi/2 phase.

Summing the active corners' waves and comparing their exponential orders
gives the cancellation/dominance analysis: which corner wins as eps -> 0,
and whether a geometry could ever be waveless.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contour import integrate_contour, lifted_corner_to_corner, raised_contour
from .divergence import DivergenceData, divergence_order, omega
from .errors import ShipwaveError
from .hull import Hull, rigid_wall_power
from .singulant import decay_exponent, exponent_integrals, singulant
from .stokes import active_corners

__all__ = [
    "WaveComponent",
    "DominanceReport",
    "first_order_angle",
    "hilbert_angle",
    "hilbert_exponent",
    "hilbert_corner_integrals",
    "hilbert_identity_residual",
    "wave_component",
    "total_wave",
    "combine_phasors",
    "downstream_amplitude",
    "dominance_analysis",
]


def first_order_angle(hull: Hull, w):
    """First-order streamline angle theta1 = -q0^2 dq0/dw.

    The derivative is taken analytically through the log-derivative of the
    corner product, so theta1 = q0^3 * sum_k sigma_k/(w + a_k).
    """
    w = np.asarray(w, dtype=complex)
    acc = np.zeros_like(w)
    for a, s in zip(hull.a, hull.sigma):
        acc += s / (w + a)
    out = np.asarray(rigid_wall_power(hull, w, 3.0) * acc)
    return out if out.ndim else complex(out)


def _moment(hull: Hull, power: int) -> float:
    return sum(s * a**power for a, s in zip(hull.a, hull.sigma))


@lru_cache(maxsize=8)
def _gauss_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_integral(fn, breaks, n=48):
    """Gauss-Legendre panel quadrature of a vectorised complex integrand."""
    x, wts = _gauss_rule(n)
    total = 0.0 + 0.0j
    for a, b in zip(breaks[:-1], breaks[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        total += half * np.sum(wts * fn(mid + half * x))
    return total


def _tail_series(w: complex, t: float, p: int, terms: int = 14) -> complex:
    """integral_T^inf dphi / (phi^p (phi - w)) = sum_j w^j/((j+p) T^(j+p))."""
    acc = 0.0 + 0.0j
    for j in range(terms):
        acc += w**j / ((j + p) * t ** (j + p))
    return acc


def _surface_breaks(t_max: float, lo: float = 0.0, hi: float | None = None, extra=()):
    """Panel breakpoints on [lo, hi]: geometric out of the stagnation point,
    geometric growth towards t_max, clipped to the window, plus extras."""
    hi = t_max if hi is None else hi
    pts = {lo, hi}
    b = 1e-7
    while b < 1.0:
        if lo < b < hi:
            pts.add(b)
        b *= 10.0
    b = 1.0
    while b < t_max:
        if lo < b < hi:
            pts.add(b)
        b *= 3.0
    for p in extra:
        if lo < p < hi:
            pts.add(p)
    return sorted(pts)


def hilbert_angle(hull: Hull, w, t_max: float | None = None) -> complex:
    """Hilbert transform of theta1 over the free surface, continued off it.

    (1/pi) * integral over (0, inf) of theta1(phi)/(phi - w); for w on the
    positive axis this returns the upper-half-plane boundary value, i.e.
    the principal value plus i*theta1(w).  The pole is handled by exact
    subtraction whenever w sits on or near the integration ray, and the
    far tail uses the analytic decay theta1 ~ C2/phi^2 + C3/phi^3.
    """
    w = complex(w)
    s1 = _moment(hull, 1)
    s2 = _moment(hull, 2)
    c2, c3 = -s1, s2 + 3.0 * s1 * s1
    t = t_max if t_max is not None else max(50.0, 20.0 * (1.0 + abs(w)))

    def f(phi):
        return first_order_angle(hull, np.asarray(phi, dtype=complex))

    tail = c2 * _tail_series(w, t, 2) + c3 * _tail_series(w, t, 3)
    x, y = w.real, w.imag
    if 0.0 < x < t and abs(y) <= 0.5:
        if y == 0.0 and x >= t:
            raise ShipwaveError(f"surface point {x} beyond the quadrature horizon {t}")
        # pole on or near the ray: subtract theta1(x)/(phi - w) over a
        # bracket around x and integrate that part in closed form
        d = min(1.0, 0.5 * x, 0.5 * (t - x))
        tx = complex(first_order_angle(hull, x))
        scales = [d]
        while scales[-1] > max(abs(y), d / 4096.0):
            scales.append(scales[-1] / 8.0)
        extra = [x + s * sc for sc in scales for s in (-1.0, 1.0)] + [x]
        main = _panel_integral(lambda p: f(p) / (p - w), _surface_breaks(t, 0.0, x - d), 48)
        main += _panel_integral(
            lambda p: (f(p) - tx) / (p - w),
            _surface_breaks(t, x - d, x + d, extra=extra),
            48,
        )
        num = x + d - w
        den = x - d - w
        if den.imag == 0.0:
            # exact boundary value: approach the axis from above, where the
            # bracket's log lands on the -pi side of its cut
            den = complex(den.real, -0.0)
        main += tx * (np.log(num) - np.log(den))
        main += _panel_integral(lambda p: f(p) / (p - w), _surface_breaks(t, x + d), 48)
        return (main + tail) / np.pi

    extra = ()
    if 0.0 < x < t and abs(y) < 1.0:
        extra = [x + s * sc * abs(y) for sc in (1.0, 3.0, 9.0, 27.0) for s in (-1, 1)] + [x]
    main = _panel_integral(lambda p: f(p) / (p - w), _surface_breaks(t, extra=extra), 48)
    return (main + tail) / np.pi


def hilbert_exponent(hull: Hull, k: int, w, quad_tol: float = 1e-6) -> complex:
    """3 * integral from -a_k to w of (H theta1)/q0^3 along the default contour.

    The imaginary part corrects each wave's amplitude, the real part its
    phase; both enter only the full model.  The path is lifted over the
    hull so the integrand stays O(1) everywhere off the anchored leg.
    """
    contour = raised_contour(hull, k, w)
    return integrate_contour(
        hull, contour, lambda z: 3.0 * hilbert_angle(hull, complex(z)),
        quad_tol=quad_tol, rel_tol=1e-9,
    )


@lru_cache(maxsize=64)
def _hilbert_corner_cached(hull: Hull, quad_tol: float) -> tuple:
    wanted = active_corners(hull).active
    out = [0.0 + 0.0j]
    for k in range(2, hull.n + 2):
        if k not in wanted:
            out.append(None)
            continue
        path = lifted_corner_to_corner(hull, 1, k)
        out.append(
            integrate_contour(
                hull, path, lambda z: 3.0 * hilbert_angle(hull, complex(z)),
                quad_tol=quad_tol, rel_tol=1e-9,
            )
        )
    return tuple(out)


def hilbert_corner_integrals(hull: Hull, quad_tol: float = 1e-6) -> tuple:
    """3 * integral from -a_1 to -a_k of (H theta1)/q0^3, for k = 1..N+1.

    The corner-pair constants entering the downstream amplitude and phase
    of each wave in the full model.  Computed only for corners in the
    active set (it is the active corners' waves that need them; at the
    stagnation corner the integral does not even converge, since the
    continued Hilbert transform carries a branch point at the endpoint of
    its integration ray).  None elsewhere.  Cached.
    """
    return _hilbert_corner_cached(hull, float(quad_tol))


def hilbert_identity_residual(hull: Hull, w: float, quad_tol: float = 1e-6) -> float:
    """Gauge of the Hilbert machinery on the free surface.

    On w > 0 the exact identity exp(-Im 3*int_{-a_1}^w H(theta1)/q0^3)
    = e * q0^3(w) holds; returns the absolute defect of the computed
    left-hand side.
    """
    if not (np.imag(w) == 0.0 and np.real(w) > 0.0):
        raise ShipwaveError("the identity applies on the free surface (real w > 0)")
    lhs = np.exp(-hilbert_exponent(hull, 1, float(np.real(w)), quad_tol=quad_tol).imag)
    rhs = np.e * rigid_wall_power(hull, float(np.real(w)), 3.0).real
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class WaveComponent:
    """One corner's switched-on wave at a free-surface point.

    The predicted contribution to the flow speed is
    amplitude_coeff * exp(exponent) * cos(-im_chi/eps + phase_const);
    every sign (including the formula's leading minus and the sign of the
    recurrence limit) is absorbed into phase_const.
    """

    corner: int
    gamma: float
    amplitude_coeff: float
    re_chi: float
    im_chi: float
    phase_const: float
    exponent: float
    eps: float
    model: str

    def value(self) -> float:
        return (
            self.amplitude_coeff
            * np.exp(self.exponent)
            * np.cos(-self.im_chi / self.eps + self.phase_const)
        )


def _base_coeff(hull: Hull, k: int, div: DivergenceData):
    sig = hull.sigma[k - 1]
    gamma = div.gamma
    return abs(hull.c[k - 1]) ** (6.0 - 3.0 * gamma) / (2.0 * (1.0 + 3.0 * sig) ** gamma)


def wave_component(
    hull: Hull,
    k: int,
    w: float,
    eps: float,
    model: str = "full",
    divergence: DivergenceData | None = None,
    quad_tol: float = 1e-9,
) -> WaveComponent:
    """Assemble corner k's wave at free-surface point w for the given model.

    ``model`` is 'full' (Hilbert corrections, conjugate pair included) or
    'simplified' (Hilbert terms dropped, single continuation, no pi/2).
    Requires k to be in the hull's active set.
    """
    if model not in ("full", "simplified"):
        raise ShipwaveError(f"unknown model {model!r}")
    if eps <= 0:
        raise ShipwaveError("eps must be positive")
    census = active_corners(hull)
    if k not in census.active:
        raise ShipwaveError(
            f"corner {k} is not in the active set {sorted(census.active)}; "
            "its Stokes line does not reach the free surface"
        )
    div = divergence if divergence is not None else omega(hull.sigma[k - 1])
    gamma = div.gamma
    theta_k = hull.theta[k - 1]
    chi = singulant(hull, k, float(w), quad_tol=quad_tol)
    q0w = rigid_wall_power(hull, float(w), 1.0).real
    coeff = _base_coeff(hull, k, div) * abs(div.omega) / q0w**5
    phase = np.pi + (np.pi if div.omega < 0 else 0.0)  # leading minus, omega sign
    phase += 0.5 * np.pi * gamma + (6.0 - 3.0 * gamma) * theta_k
    if model == "full":
        h = hilbert_exponent(hull, k, float(w))
        coeff *= (4.0 * np.pi / eps**gamma) * np.exp(-h.imag)
        phase += 0.5 * np.pi + h.real
    else:
        coeff *= 2.0 * np.pi / eps**gamma
    return WaveComponent(
        corner=k,
        gamma=gamma,
        amplitude_coeff=float(coeff),
        re_chi=float(chi.real),
        im_chi=float(chi.imag),
        phase_const=float(phase),
        exponent=float(-chi.real / eps),
        eps=float(eps),
        model=model,
    )


def total_wave(hull: Hull, w: float, eps: float, model: str = "simplified") -> float:
    """Sum of the active corners' switched-on waves at free-surface point w."""
    census = active_corners(hull)
    if census.undetermined:
        raise ShipwaveError(
            f"corners {sorted(census.undetermined)} have undetermined Stokes lines; "
            "refusing to sum an incomplete active set"
        )
    return float(
        sum(wave_component(hull, k, w, eps, model).value() for k in sorted(census.active))
    )


def combine_phasors(amplitudes, phases) -> tuple[float, float]:
    """Resultant (amplitude, phase) of same-frequency cosine waves."""
    z = sum(a * cmath.exp(1j * p) for a, p in zip(amplitudes, phases))
    return abs(z), float(np.angle(z))


@dataclass(frozen=True)
class DownstreamWave:
    corner: int
    amplitude: float
    phase: float
    gamma: float
    exponential_rate: float  # Re chi_k on the axis; decay e^{-rate/eps}


@dataclass(frozen=True)
class DownstreamPrediction:
    amplitude: float
    phase: float
    components: tuple[DownstreamWave, ...]
    model: str
    eps: float


def downstream_amplitude(hull: Hull, eps: float, model: str = "simplified") -> DownstreamPrediction:
    """Far-downstream resultant wave amplitude with per-corner breakdown.

    All active corners share the downstream wavenumber (d chi/dw -> i), so
    their waves differ only by constant phasors; the corner-to-corner
    exponent integrals supply the relative exponential orders and phase
    offsets, and the resultant follows by phasor addition with q0 -> 1.
    """
    if eps <= 0:
        raise ShipwaveError("eps must be positive")
    census = active_corners(hull)
    if census.undetermined:
        raise ShipwaveError(
            f"corners {sorted(census.undetermined)} undetermined; no amplitude claim"
        )
    rex = decay_exponent(hull)
    rel = exponent_integrals(hull)
    hil = hilbert_corner_integrals(hull) if model == "full" else None
    comps = []
    for k in sorted(census.active):
        div = omega(hull.sigma[k - 1])
        gamma = div.gamma
        base = _base_coeff(hull, k, div) * abs(div.omega)
        i_k = rel[k - 1]
        rate = rex + i_k.imag
        amp = base * np.exp(-rate / eps)
        phase = np.pi + (np.pi if div.omega < 0 else 0.0)
        phase += 0.5 * np.pi * gamma + (6.0 - 3.0 * gamma) * hull.theta[k - 1]
        phase += i_k.real / eps
        if model == "full":
            j_k = hil[k - 1]
            amp *= (4.0 * np.pi * np.e / eps**gamma) * np.exp(j_k.imag)
            phase += 0.5 * np.pi - j_k.real
        else:
            amp *= 2.0 * np.pi / eps**gamma
        phase = float(np.angle(np.exp(1j * phase)))
        comps.append(
            DownstreamWave(
                corner=k, amplitude=float(amp), phase=phase, gamma=gamma, exponential_rate=rate
            )
        )
    total, ph = combine_phasors([c.amplitude for c in comps], [c.phase for c in comps])
    return DownstreamPrediction(
        amplitude=float(total), phase=ph, components=tuple(comps), model=model, eps=float(eps)
    )


@dataclass(frozen=True)
class DominanceReport:
    """Exponential-order comparison of the singulant-bearing corners.

    ``rows`` holds (corner, Im I_k, gamma_k, log-prefactor); verdicts:
    'dominant-corner' (unique smallest exponential order),
    'possible-cancellation' (tied orders, equal gamma),
    'impossible-for-distinct-corners' (2-hull tie but unequal prefactors),
    'mixed-orders' (tied orders, different gamma: no cancellation).
    """

    rows: tuple[tuple[int, float, float, float], ...]
    verdict: str
    dominant: int | None = None
    pair: tuple[int, ...] = ()
    detail: str = ""


def dominance_analysis(hull: Hull, eps: float, tie_tol: float = 1e-9) -> DominanceReport:
    """Rank the corners' wave orders and decide whether cancellation is open.

    The corner with the smallest Im I_k (I_k from -a_1 to -a_k of
    dphi/q0^3) carries the exponentially largest wave as eps -> 0.  Ties
    at equal gamma leave cancellation open in general, but a two-cornered
    hull then needs |c_1| = |c_2|, which forces a_1 = a_2: impossible for
    distinct corners, so a 2-hull can never be waveless.
    """
    rel = exponent_integrals(hull)
    rows = []
    for k in hull.corners:
        if not hull.has_singulant(k):
            continue
        div = omega(hull.sigma[k - 1])
        rows.append(
            (
                k,
                float(rel[k - 1].imag),
                float(div.gamma),
                float(np.log(_base_coeff(hull, k, div) * abs(div.omega))),
            )
        )
    if not rows:
        return DominanceReport(rows=(), verdict="mixed-orders", detail="no singulant-bearing corners")
    scale = max(1.0, max(abs(r[1]) for r in rows))
    emin = min(r[1] for r in rows)
    tied = [r for r in rows if r[1] - emin <= tie_tol * scale]
    if len(tied) == 1:
        k = tied[0][0]
        return DominanceReport(
            rows=tuple(rows),
            verdict="dominant-corner",
            dominant=k,
            detail=f"corner {k} has the least exponent integral; it dominates as eps -> 0",
        )
    gammas = [r[2] for r in tied]
    if max(gammas) - min(gammas) > 1e-12:
        return DominanceReport(
            rows=tuple(rows),
            verdict="mixed-orders",
            pair=tuple(r[0] for r in tied),
            detail="tied exponentials carry different algebraic orders; no cancellation",
        )
    pair = tuple(r[0] for r in tied)
    if hull.n == 2 and pair == (1, 2):
        c1, c2 = abs(hull.c[0]), abs(hull.c[1])
        if abs(c1 - c2) > 1e-12 * max(c1, c2):
            return DominanceReport(
                rows=tuple(rows),
                verdict="impossible-for-distinct-corners",
                pair=pair,
                detail=(
                    f"equal exponentials and orders but |c_1|={c1:.6g} != |c_2|={c2:.6g}; "
                    "prefactors match only for coincident corners, so the waves cannot cancel"
                ),
            )
    return DominanceReport(
        rows=tuple(rows),
        verdict="possible-cancellation",
        pair=pair,
        detail="tied exponentials with equal orders; cancellation hinges on the prefactors",
    )
