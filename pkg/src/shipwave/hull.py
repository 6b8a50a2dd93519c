"""Piecewise-linear hull geometry and the rigid-wall (leading-order) flow.

A semi-infinite two-dimensional hull with N submerged corners is described
in the complex-potential plane: the k-th corner sits at w = -a_k on the
negative real axis (a_1 > a_2 > ... > a_N > a_{N+1} = 0, the stagnation
point), turns the surface through an exterior angle pi*sigma_k, and the
corner strengths are normalised so that sum(a_1..a_N) = 1.  The rigid-wall
speed field is the product

    q(w) = prod_k (w + a_k)^(-sigma_k),    k = 1..N+1,

with the closure exponent sigma_{N+1} = -sum(sigma_1..sigma_N) so that
q -> 1 far downstream.  Every factor takes its branch cut vertically
downward from its corner, which makes q single-valued and analytic in the
closed upper half-plane minus the corner points and guarantees
arg(c_k) = theta_k for the local prefactors.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchPointError, HullError, NoSingulantError

__all__ = [
    "HullSpec",
    "Hull",
    "InnerScaleReport",
    "normalize",
    "rigid_wall_speed",
    "rigid_wall_power",
    "log_derivative",
    "local_prefactor",
    "inner_region_scale",
]


@dataclass(frozen=True)
class HullSpec:
    """Raw hull input: per-corner (K, sigma) pairs, K > 0, sigma in (-1,1)\\{0}.

    K_i is the (dimensional) magnitude of the potential at corner i; only
    the ratios matter.  ``froude_param`` may carry a default epsilon for
    runs driven by config files.
    """

    corners: tuple[tuple[float, float], ...]
    froude_param: float | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "corners", tuple((float(k), float(s)) for k, s in self.corners))
        if not self.corners:
            raise HullError("hull needs at least one corner")
        for i, (k, s) in enumerate(self.corners, start=1):
            if not k > 0:
                raise HullError(f"corner {i}: potential increment K={k} must be positive")
            if not (-1.0 < s < 1.0) or s == 0.0:
                raise HullError(f"corner {i}: angle fraction sigma={s} must lie in (-1,1), nonzero")
        if self.froude_param is not None and not self.froude_param > 0:
            raise HullError(f"froude parameter must be positive, got {self.froude_param}")


@dataclass(frozen=True)
class Hull:
    """Normalised hull: corner positions, angles, inclinations, prefactors.

    All tuples have length N+1; entry index i corresponds to corner
    k = i+1 in the 1-based convention used throughout the public API.
    The last entry is the stagnation closure: a_{N+1} = 0 and
    sigma_{N+1} = -sum(sigma_1..sigma_N).  ``theta`` holds the facet
    inclinations theta_k = pi * sum(sigma_1..sigma_k); theta_0 = 0 is
    implicit.  ``c`` holds the local prefactors of the rigid-wall flow,
    q ~ c_k (w + a_k)^(-sigma_k) near w = -a_k, with arg(c_k) = theta_k.
    """

    n: int
    a: tuple[float, ...]
    sigma: tuple[float, ...]
    theta: tuple[float, ...]
    c: tuple[complex, ...] = field(repr=False, compare=False)
    label: str = field(default="", compare=False)

    @property
    def corners(self) -> range:
        """1-based corner indices, stagnation closure included."""
        return range(1, self.n + 2)

    def position(self, k: int) -> float:
        """Potential-plane location -a_k of corner k (1-based)."""
        return -self.a[k - 1]

    def min_spacing(self) -> float:
        """Smallest gap between consecutive corner positions."""
        return min(self.a[i] - self.a[i + 1] for i in range(self.n))

    def has_singulant(self, k: int) -> bool:
        """True when corner k supports a singulant (sigma_k > -1/3, nonzero)."""
        s = self.sigma[k - 1]
        return s > -1.0 / 3.0 and s != 0.0


@dataclass(frozen=True)
class InnerScaleReport:
    """Inner-region width at one corner plus the corner pairs it swallows."""

    corner: int
    length: float
    flagged: tuple[tuple[int, float], ...]  # (other corner index, separation)

    @property
    def reliable(self) -> bool:
        return not self.flagged


def normalize(spec: HullSpec) -> Hull:
    """Build a :class:`Hull` from raw (K, sigma) pairs.

    Corner positions are a_i = K_i / sum(K), sorted descending so a_1 is
    farthest upstream; the stagnation closure (a=0, sigma=-sum sigma) is
    appended.  Raises :class:`HullError` for coincident corners or facet
    inclinations outside (-pi, pi).
    """
    total = sum(k for k, _ in spec.corners)
    pairs = sorted(((k / total, s) for k, s in spec.corners), key=lambda p: -p[0])
    a = [p[0] for p in pairs]
    sigma = [p[1] for p in pairs]
    for i in range(len(a) - 1):
        if a[i] == a[i + 1]:
            raise HullError(f"corners {i + 1} and {i + 2} coincide at a={a[i]}")
    a.append(0.0)
    sigma.append(-sum(sigma))

    theta = []
    acc = 0.0
    for s in sigma:
        acc += s
        theta.append(np.pi * acc)
    for k, t in enumerate(theta[:-1], start=1):
        if not (-np.pi < t < np.pi):
            raise HullError(f"facet inclination theta_{k}={t:.6g} outside (-pi, pi)")

    c = tuple(_prefactor(a, sigma, k) for k in range(1, len(a) + 1))
    return Hull(
        n=len(spec.corners),
        a=tuple(a),
        sigma=tuple(sigma),
        theta=tuple(theta),
        c=c,
        label=spec.label,
    )


def _branch_arg(z):
    """Argument of z in [-pi/2, 3pi/2): branch cut pointing straight down."""
    ang = np.angle(z)
    return np.where(ang < -np.pi / 2, ang + 2.0 * np.pi, ang)


def rigid_wall_power(hull: Hull, w, p=1.0, skip: int | None = None):
    """(rigid-wall speed)^p at complex w, on the downward-cut branch.

    Works for scalar or ndarray ``w``; evaluated as exp of a log-sum so
    large exponents neither overflow nor lose the branch.  With ``skip=k``
    the factor anchored at corner k (1-based) is left out, which gives the
    function that remains analytic at -a_k.
    """
    w = np.asarray(w, dtype=complex)
    for j, a in enumerate(hull.a, start=1):
        if j != skip and np.any(w == -a):
            raise BranchPointError(f"rigid-wall flow evaluated at corner {j}")
    acc = np.zeros_like(w)
    for j, (a, s) in enumerate(zip(hull.a, hull.sigma), start=1):
        if j == skip:
            continue
        z = w + a
        acc += (-p * s) * (np.log(np.abs(z)) + 1j * _branch_arg(z))
    out = np.exp(acc)
    return out if out.ndim else complex(out)


def rigid_wall_speed(hull: Hull, w):
    """Rigid-wall (leading-order) complex flow speed q at potential w."""
    return rigid_wall_power(hull, w, 1.0)


def log_derivative(hull: Hull, w):
    """d(log q)/dw = -sum_k sigma_k / (w + a_k) for the rigid-wall flow."""
    w = np.asarray(w, dtype=complex)
    if np.any([np.any(w == -a) for a in hull.a]):
        raise BranchPointError("log-derivative evaluated at a corner position")
    acc = np.zeros_like(w)
    for a, s in zip(hull.a, hull.sigma):
        acc -= s / (w + a)
    return acc if acc.ndim else complex(acc)


def _prefactor(a, sigma, k: int) -> complex:
    ak = a[k - 1]
    acc = 0.0 + 0.0j
    for j, (aj, sj) in enumerate(zip(a, sigma), start=1):
        if j == k:
            continue
        d = aj - ak
        if d == 0.0:
            raise HullError(f"corners {j} and {k} coincide; prefactor undefined")
        # d is real: branch argument is 0 (j upstream of k) or pi (downstream)
        acc += -sj * (np.log(abs(d)) + (1j * np.pi if d < 0 else 0.0))
    return cmath.exp(acc)


def local_prefactor(hull: Hull, k: int) -> complex:
    """Prefactor c_k of the corner-k singularity, q ~ c_k (w+a_k)^(-sigma_k).

    c_k = prod_{j != k} (a_j - a_k)^(-sigma_j) on the same branch as the
    flow itself, which forces arg(c_k) = theta_k.
    """
    return _prefactor(hull.a, hull.sigma, k)


def inner_region_scale(hull: Hull, k: int, eps: float) -> InnerScaleReport:
    """Inner-region width eps^(1/(1+3*sigma_k)) at corner k.

    Flags every other corner closer to corner k than this width; the
    separated-corner asymptotics is unreliable for flagged pairs.
    """
    if eps <= 0:
        raise HullError(f"epsilon must be positive, got {eps}")
    s = hull.sigma[k - 1]
    if s <= -1.0 / 3.0:
        raise NoSingulantError(
            f"corner {k}: sigma={s} <= -1/3, no singulant and no inner scale"
        )
    length = eps ** (1.0 / (1.0 + 3.0 * s))
    ak = hull.a[k - 1]
    flagged = tuple(
        (j, abs(aj - ak))
        for j, aj in enumerate(hull.a, start=1)
        if j != k and abs(aj - ak) < length
    )
    return InnerScaleReport(corner=k, length=length, flagged=flagged)
