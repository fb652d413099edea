"""Spherical smoothing on the circle.

The kernel ``g_{rho,r,s}`` acts on functions on S^1 as a Fourier multiplier with
eigenvalues ``lambda_d = I_d(a)/I_0(a)``, ``a = rho r s / (1 - rho^2)``. From
these we build the mean-subtracted arc stability ``F(theta)`` and the deficit
of a three-arc partition relative to three equal arcs.

For negative rho the eigenvalues carry the sign ``(-1)^d``; every function
here takes the signed argument ``a`` and applies that convention itself.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from .special_functions import bessel_i, bessel_ratios

__all__ = [
    "RegimeError",
    "SphericalKernelParams",
    "EigenvalueSequence",
    "ArcPartition",
    "DEFAULT_DEPTH",
    "kernel_g",
    "lambda_values",
    "lambda_sequence",
    "lambda_envelopes",
    "lambda_bounds",
    "arc_F",
    "arc_F_series",
    "arc_F_uncertainty",
    "arc_F_quadrature",
    "arc_F_derivative",
    "arc_deficit",
    "arc_deficit_series",
    "squared_deficit",
    "lemma7_rhs",
    "lemma10_rhs",
    "lemma6_ratio",
    "three1_sides",
]

DEFAULT_DEPTH = 30
TWO_PI = 2 * math.pi


class RegimeError(ValueError):
    """Parameter outside the regime where a bound is stated."""


@dataclass(frozen=True)
class SphericalKernelParams:
    """Correlation ``rho`` and radii ``r, s`` of the two circles."""

    rho: float
    r: float = 1.0
    s: float = 1.0
    n: int = 2

    def __post_init__(self):
        if not -1 < self.rho < 1:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")
        if self.r <= 0 or self.s <= 0:
            raise ValueError("radii must be positive")
        if self.n != 2:
            raise NotImplementedError("only the circle (n = 2) is supported")

    @property
    def a(self) -> float:
        """Signed Bessel argument rho r s / (1 - rho^2)."""
        return self.rho * self.r * self.s / (1 - self.rho ** 2)

    @classmethod
    def from_argument(cls, a: float) -> "SphericalKernelParams":
        """Parameters with r = s = 1 and rho/(1-rho^2) = a."""
        if a == 0:
            return cls(0.0)
        rho = 2 * abs(a) / (1 + math.sqrt(1 + 4 * a * a))
        return cls(math.copysign(rho, a))


@dataclass(frozen=True)
class EigenvalueSequence:
    params: SphericalKernelParams
    values: np.ndarray
    D: int
    tail_bound: float


@dataclass(frozen=True)
class ArcPartition:
    theta: tuple

    def __post_init__(self):
        th = tuple(float(t) for t in self.theta)
        if len(th) != 3 or min(th) < 0:
            raise ValueError("need three non-negative angles")
        if abs(sum(th) - TWO_PI) > 1e-12:
            raise ValueError(f"angles must sum to 2*pi, got {sum(th)!r}")
        object.__setattr__(self, "theta", th)

    @classmethod
    def equal(cls) -> "ArcPartition":
        return cls((TWO_PI / 3,) * 3)


def _as_a(params_or_a):
    if isinstance(params_or_a, SphericalKernelParams):
        return params_or_a.a
    return params_or_a


def kernel_g(params: SphericalKernelParams, t):
    """Unit-mean kernel ``exp(a t) / I_0(a)`` evaluated at ``t`` in [-1, 1]."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1):
        raise ValueError("t must lie in [-1, 1]")
    a = params.a
    return np.exp(a * t - abs(a)) / bessel_i(0, abs(a), scaled=True)


def lambda_values(a, D):
    """Eigenvalues lambda_0..lambda_D for signed argument(s) ``a``.

    Returns an array of shape ``np.shape(a) + (D+1,)``.
    """
    a = np.asarray(a, dtype=float)
    ratios = bessel_ratios(0, np.abs(a), D)
    lam = np.ones(a.shape + (D + 1,))
    lam[..., 1:] = np.cumprod(ratios, axis=-1)
    neg = a < 0
    if np.any(neg):
        sign = (-1.0) ** np.arange(D + 1)
        lam = np.where(neg[..., None], lam * sign, lam)
    return lam


def lambda_envelopes(a, d):
    """The four product envelopes for lambda_d at a > 0.

    Returns ``(low_a, up_a, low_b, up_b)``: the first pair from the plain
    Amos bracket, the second from the half-integer shifted bracket.
    """
    a = np.asarray(a, dtype=float)
    j = np.arange(d)
    aa = a[..., None]
    low_a = np.prod(aa / (1 + j + np.sqrt((1 + j) ** 2 + aa * aa)), axis=-1)
    # the j = 0 factor of the plain upper bound is a/|a|; take its limit 1 at a = 0
    with np.errstate(invalid="ignore"):
        f = aa / (j + np.sqrt(j * j + aa * aa))
    up_a = np.prod(np.where((aa == 0) & (j == 0), 1.0, f), axis=-1)
    low_b = np.prod(aa / (j + 0.5 + np.sqrt((j + 1.5) ** 2 + aa * aa)), axis=-1)
    up_b = np.prod(aa / (j + 0.5 + np.sqrt((j + 0.5) ** 2 + aa * aa)), axis=-1)
    return low_a, up_a, low_b, up_b


def lambda_bounds(params: SphericalKernelParams, d: int):
    """Tightest certified ``(lower, upper)`` bracket of lambda_d for rho > 0."""
    if params.rho <= 0:
        raise RegimeError("envelopes are stated for rho in (0, 1)")
    if d < 1:
        raise ValueError("d must be at least 1")
    low_a, up_a, low_b, up_b = lambda_envelopes(params.a, d)
    return float(max(low_a, low_b)), float(min(up_a, up_b))


def _tail_bound(abs_a, D):
    # lambda_d <= lambda_{D+1} <= upper envelope for d > D, and sum_{d>D} 1/d^2 < 1/D
    _, up_a, _, up_b = lambda_envelopes(abs_a, D + 1)
    return np.minimum(up_a, up_b) / D


def lambda_sequence(params: SphericalKernelParams, D: int = DEFAULT_DEPTH) -> EigenvalueSequence:
    if D < 1:
        raise ValueError("D must be at least 1")
    vals = lambda_values(params.a, D)
    return EigenvalueSequence(params, vals, D, float(_tail_bound(abs(params.a), D)))


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < -1e-12) or np.any(theta > TWO_PI + 1e-12):
        raise ValueError("theta must lie in [0, 2*pi]")
    return theta


def arc_F_series(a, theta, D=DEFAULT_DEPTH):
    """``(2/pi^2) sum_{d<=D} lambda_d sin^2(theta d / 2) / d^2``.

    ``a`` and ``theta`` broadcast against each other.
    """
    a = np.asarray(a, dtype=float)
    theta = np.asarray(theta, dtype=float)
    lam = lambda_values(a, D)[..., 1:]
    d = np.arange(1, D + 1)
    s = np.sin(theta[..., None] * d / 2) ** 2 / d ** 2
    return 2 / math.pi ** 2 * np.sum(lam * s, axis=-1)


def arc_F(params, theta, D=DEFAULT_DEPTH):
    """Mean-subtracted stability of an arc of length ``theta``."""
    theta = _check_theta(theta)
    out = arc_F_series(_as_a(params), theta, D)
    return float(out) if np.ndim(out) == 0 else out


def arc_F_uncertainty(params, D=DEFAULT_DEPTH):
    """Bound on the truncation error of :func:`arc_F`."""
    return 2 / math.pi ** 2 * float(_tail_bound(abs(_as_a(params)), D))


def arc_F_quadrature(params, theta, tol=1e-12):
    """Adaptive 2-D quadrature of the arc stability double integral."""
    theta = float(_check_theta(theta))
    if theta == 0:
        return 0.0
    a = _as_a(params)
    norm = 4 * math.pi ** 2 * float(bessel_i(0, abs(a), scaled=True))
    val, _ = integrate.dblquad(
        lambda y, x: math.exp(a * math.cos(x - y) - abs(a)),
        0, theta, 0, theta, epsabs=tol, epsrel=tol,
    )
    return val / norm - (theta / TWO_PI) ** 2


def arc_F_derivative(params, theta, tol=1e-13):
    """F'(theta) from the one-dimensional closed form."""
    theta = float(_check_theta(theta))
    a = _as_a(params)
    val, _ = integrate.quad(lambda b: math.exp(a * math.cos(b) - abs(a)), 0, theta,
                            epsabs=tol, epsrel=tol, limit=200)
    return val / (2 * math.pi ** 2 * float(bessel_i(0, abs(a), scaled=True))) - theta / (2 * math.pi ** 2)


def squared_deficit(theta):
    """sum_i (theta_i / 2pi - 1/3)^2 over the last axis."""
    theta = np.asarray(theta, dtype=float)
    return np.sum((theta / TWO_PI - 1 / 3) ** 2, axis=-1)


def arc_deficit_series(a, theta, D=DEFAULT_DEPTH):
    """Vectorized deficit; ``theta`` has a trailing axis of length 3."""
    theta = np.asarray(theta, dtype=float)
    a = np.asarray(a, dtype=float)
    F = arc_F_series(a[..., None], theta, D)
    return -3 * arc_F_series(a, TWO_PI / 3, D) + np.sum(F, axis=-1)


def arc_deficit(params, partition: ArcPartition, D=DEFAULT_DEPTH) -> float:
    """-3 F(2pi/3) + sum_i F(theta_i)."""
    if not isinstance(partition, ArcPartition):
        partition = ArcPartition(partition)
    return float(arc_deficit_series(_as_a(params), np.array(partition.theta), D))


_K = 3 ** (4 / 3) / 5


def lemma7_rhs(a, theta):
    """Upper bound on the deficit when every arc has length at most pi."""
    a = np.asarray(a, dtype=float)
    factor = -1 + (1 - _K) * np.exp(-a * math.pi / 2) + _K * np.exp(-a * math.pi / 6)
    return 0.158 * factor * squared_deficit(theta)


def lemma10_rhs(a, theta):
    """Upper bound on the deficit when the largest arc has length at least pi."""
    lam1 = lambda_values(a, 1)[..., 1]
    return -13 / (9 * math.pi ** 2) * lam1 * squared_deficit(theta)


def lemma6_ratio(params, t):
    """2 int_{-t}^{t} e^{a sin b} db / int_0^{2pi} e^{a cos} , compared with 2t/pi."""
    a = _as_a(params)
    num, _ = integrate.quad(lambda b: math.exp(a * math.sin(b) - abs(a)), -t, t,
                            epsabs=1e-14, epsrel=1e-13)
    return 2 * num / (TWO_PI * float(bessel_i(0, abs(a), scaled=True)))


def three1_sides(a, D=DEFAULT_DEPTH):
    """Both sides of the comparison between three 120-degree arcs and two half circles.

    Returns ``(left, right, tail)`` where left sums over d not divisible by 3,
    right over odd d, and ``tail`` bounds what truncation can change.
    """
    lam = lambda_values(abs(a), D)[1:]
    d = np.arange(1, D + 1)
    left = 9 / (2 * math.pi ** 2) * np.sum(np.where(d % 3 != 0, lam / d ** 2, 0.0))
    right = 4 / math.pi ** 2 * np.sum(np.where(d % 2 == 1, lam / d ** 2, 0.0))
    tail = 9 / (2 * math.pi ** 2) * float(_tail_bound(abs(a), D))
    return float(left), float(right), tail
