"""Modified Bessel functions of the first kind, Bessel ratios, Hermite
polynomials and standard Gaussian helpers.

Everything here is a pure function of its arguments. Array inputs are
accepted wherever the argument is ``x``; orders and degrees are scalars.
"""

import math

import numpy as np
from scipy import special as sc

__all__ = [
    "DomainError",
    "UnsupportedDegreeError",
    "SERIES_MAX_X",
    "HERMITE_MAX_DEGREE",
    "bessel_i",
    "bessel_ratio",
    "bessel_ratios",
    "ratio_bounds",
    "hermite",
    "hermite_orthonormal",
    "gaussian_density",
    "gaussian_tail",
    "exp_times_tail",
]

SERIES_MAX_X = 30.0
HERMITE_MAX_DEGREE = 60


class DomainError(ValueError):
    """Argument outside the documented domain of a function."""


class UnsupportedDegreeError(ValueError):
    """Polynomial degree above the documented cap."""


def _check_order_arg(order, x):
    if not np.isfinite(order) or order < 0:
        raise DomainError(f"Bessel order must be a finite non-negative real, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("Bessel argument must be finite and non-negative")
    return x


def _bessel_i_series(order, x):
    # sum_m (x/2)^(2m+order) / (m! Gamma(m+order+1)); all terms positive
    half = x / 2.0
    with np.errstate(divide="ignore"):
        term = np.where(
            x > 0,
            np.exp(order * np.log(np.where(x > 0, half, 1.0)) - math.lgamma(order + 1.0)),
            1.0 if order == 0 else 0.0,
        )
    total = term.copy()
    q = half * half
    m = 0
    while True:
        m += 1
        term = term * q / (m * (m + order))
        total += term
        if m > 3 and np.all(term <= 1e-17 * total):
            break
    return total


def bessel_i(order, x, scaled=False):
    """Modified Bessel function of the first kind.

    Parameters
    ----------
    order : float
        Order alpha >= 0.
    x : float or array_like
        Argument, x >= 0.
    scaled : bool
        If True return ``exp(-x) * I_alpha(x)``.

    Returns
    -------
    float or ndarray

    Notes
    -----
    The power series is summed for x <= 30, where it has no cancellation.
    Above that, ``scipy.special.ive`` supplies the exponentially scaled value.
    """
    xa = _check_order_arg(order, x)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    small = xa <= SERIES_MAX_X
    if np.any(small):
        v = _bessel_i_series(float(order), xa[small])
        out[small] = v * np.exp(-xa[small]) if scaled else v
    if np.any(~small):
        v = sc.ive(order, xa[~small])
        out[~small] = v if scaled else v * np.exp(xa[~small])
    return out[0] if scalar else out


def ratio_bounds(order, x):
    """Three lower/upper brackets for I_{alpha+1}(x)/I_alpha(x).

    Returns a list of ``(lower, upper)`` pairs, one per classical bound.
    """
    x = np.asarray(x, dtype=float)
    a = float(order)
    return [
        (x / (a + 1 + np.sqrt((a + 1) ** 2 + x * x)), x / (a + np.sqrt(a * a + x * x))),
        (x / (a + 0.5 + np.sqrt((a + 1.5) ** 2 + x * x)), x / (a + 0.5 + np.sqrt((a + 0.5) ** 2 + x * x))),
        (x / (1 + a + np.sqrt((a + 1) ** 2 + x * x)), x / (a + np.sqrt((a + 2) ** 2 + x * x))),
    ]


def bessel_ratios(order, x, count):
    """Consecutive ratios I_{alpha+j+1}(x)/I_{alpha+j}(x) for j = 0..count-1.

    Backward recurrence ``r_k = x / (2(alpha+k+1) + x r_{k+1})`` started far
    above the requested orders from a tight bracket midpoint. The ratios are
    the minimal solution of the recurrence, so errors in the start value are
    damped on the way down.

    Returns
    -------
    ndarray of shape ``np.shape(x) + (count,)``
    """
    x = _check_order_arg(order, x)
    if count < 1:
        raise DomainError("count must be at least 1")
    xmax = float(x.max()) if x.size else 0.0
    depth = count - 1 + int(math.ceil(20 + 6 * math.sqrt(xmax)))
    nu = order + depth
    r = 0.5 * (x / (nu + 0.5 + np.sqrt((nu + 1.5) ** 2 + x * x))
               + x / (nu + 0.5 + np.sqrt((nu + 0.5) ** 2 + x * x)))
    out = np.empty(x.shape + (count,))
    for k in range(depth - 1, -1, -1):
        r = x / (2.0 * (order + k + 1) + x * r)
        if k < count:
            out[..., k] = r
    return out


def bessel_ratio(order, x):
    """I_{alpha+1}(x) / I_alpha(x), computed without forming either factor."""
    return bessel_ratios(order, x, 1)[..., 0]


def hermite(m, x):
    """Hermite polynomial h_m(x) = sum_k x^(m-2k) (-1)^k 2^(-k) / (k! (m-2k)!).

    This is He_m(x)/m!, evaluated by the recurrence
    ``h_{m+1} = (x h_m - h_{m-1}) / (m+1)``.
    """
    if int(m) != m or m < 0:
        raise DomainError(f"degree must be a non-negative integer, got {m}")
    if m > HERMITE_MAX_DEGREE:
        raise UnsupportedDegreeError(f"degree {m} exceeds cap {HERMITE_MAX_DEGREE}")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(int(m)):
        prev, cur = cur, (x * cur - prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def hermite_orthonormal(m, x):
    """sqrt(m!) h_m(x); orthonormal under the standard Gaussian."""
    return math.sqrt(math.factorial(int(m))) * hermite(m, x)


def gaussian_density(t):
    t = np.asarray(t, dtype=float)
    return np.exp(-0.5 * t * t) / math.sqrt(2 * math.pi)


def gaussian_tail(lower):
    """P(Z > lower) for a standard normal Z; ``-inf`` gives 1."""
    return 0.5 * sc.erfc(np.asarray(lower, dtype=float) / math.sqrt(2.0))


def exp_times_tail(A, lower):
    """``exp(A) * gaussian_tail(lower)`` without overflow for large A.

    For lower >= 0 the tail is written as ``exp(-lower^2/2) erfcx(lower/sqrt2)/2``
    so the two exponentials combine before evaluation.
    """
    A = np.asarray(A, dtype=float)
    lower = np.asarray(lower, dtype=float)
    z = lower / math.sqrt(2.0)
    pos = lower >= 0
    with np.errstate(over="ignore"):
        direct = np.exp(A) * 0.5 * sc.erfc(np.where(pos, 0.0, z))
    safe = 0.5 * np.exp(A - z * z) * sc.erfcx(np.where(pos, z, 0.0))
    return np.where(pos, safe, direct)
