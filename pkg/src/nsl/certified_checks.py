"""Grid verifications of the numerical inequalities behind the stability theorem.

Each ``check_*`` function evaluates one inequality on a grid and returns a
:class:`CheckReport` holding the smallest margin (right side minus left side,
oriented so positive means the inequality holds) and where it occurs.

Points where both sides vanish identically (the equal-angle partition, the
origin) carry no information and are excluded; the report counts them.
"""

from dataclasses import dataclass, field, asdict
import math
import time

import numpy as np
from scipy import integrate
from scipy.special import erfc, erfcx
from numpy.polynomial.legendre import leggauss

from .special_functions import bessel_i, exp_times_tail
from .spherical_stability import (
    DEFAULT_DEPTH,
    arc_F_series,
    arc_F_uncertainty,
    arc_deficit_series,
    lambda_values,
    lemma7_rhs,
    lemma10_rhs,
    squared_deficit,
    three1_sides,
)

__all__ = [
    "GridSpec",
    "CheckReport",
    "check_two8",
    "check_rk1comp",
    "check_lastlem",
    "check_convbd2",
    "convbd2_transform",
    "convbd2_transform_bessel",
    "check_neg_linear",
    "check_lemma28_constant",
    "lemma28_closed_form",
    "lemma28_integral",
    "lemma28_restricted",
    "check_lemma29_constant",
    "lemma29_integral",
    "lemma29_closed_form",
    "lemma29_displayed",
    "check_lemma29z_constant",
    "lemma29z_raw",
    "lemma29z_alpha",
    "check_cor1_scalar",
    "check_lemma10_conclusion",
    "check_lemma7_property",
    "check_three1",
    "CHECKS",
    "GROUPS",
    "run_check",
    "run_group",
    "grid_overrides",
    "stability_warning",
]

TWO_PI = 2 * math.pi
_K = 3 ** (4 / 3) / 5


@dataclass
class GridSpec:
    axes: list  # of (name, min, max, count)

    @property
    def total(self):
        return int(np.prod([a[3] for a in self.axes])) if self.axes else 0

    def as_dict(self):
        return {"axes": [{"name": n, "min": lo, "max": hi, "count": c} for n, lo, hi, c in self.axes],
                "total": self.total}


@dataclass
class CheckReport:
    name: str
    grid: GridSpec
    min_margin: float
    argmin: dict
    verdict: str
    runtime: float
    uncertainty: float = 0.0
    excluded: int = 0
    details: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "pass"

    def as_dict(self):
        d = asdict(self)
        d["grid"] = self.grid.as_dict()
        return _jsonable(d)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _report(name, grid, margins, points, t0, **extra):
    """Build a report from a flat margin array and matching point dicts."""
    margins = np.asarray(margins, dtype=float)
    i = int(np.argmin(margins))
    m = float(margins[i])
    return CheckReport(
        name=name,
        grid=grid,
        min_margin=m,
        argmin=points(i),
        verdict="pass" if m > 0 else "fail",
        runtime=time.perf_counter() - t0,
        **extra,
    )


# ---------------------------------------------------------------- replicas

def _two8_part(rho, r, w):
    """e^{-A/2}/2 + e^{3A/2} P(Z > 2 rho r w / sqrt(1-rho^2)), A = rho^2 r^2 w^2/(1-rho^2)."""
    q = 1 - rho * rho
    A = rho * rho * r * r * w * w / q
    return 0.5 * np.exp(-A / 2) + exp_times_tail(1.5 * A, 2 * rho * r * w / math.sqrt(q))


def check_two8(rho=0.1, c=0.109, r_max=150.0, count=10000):
    """Lower bound on the radial average against c (1 - e^{-r rho/2}).

    ``y = c - c(1-k) part(pi/2) - c k part(pi/6)`` with ``k = 3^{4/3}/5`` and
    the condition is ``y >= c (1 - e^{-r rho/2})`` on ``linspace(0, r_max, count)``.
    The origin, where both sides vanish, is excluded.
    """
    t0 = time.perf_counter()
    if not 0 < rho <= 0.1:
        raise ValueError("rho must lie in (0, 0.1]")
    r = np.linspace(0, r_max, count)[1:]
    y = c - c * (1 - _K) * _two8_part(rho, r, math.pi / 2) - c * _K * _two8_part(rho, r, math.pi / 6)
    margin = y - c * (1 - np.exp(-r * rho / 2))
    grid = GridSpec([("r", 0.0, r_max, count)])
    return _report(f"two8(rho={rho:g}, c={c:g})", grid, margin, lambda i: {"r": float(r[i])}, t0,
                   excluded=1, uncertainty=1e-15,
                   details={"rho": rho, "c": c, "finite": bool(np.all(np.isfinite(margin)))})


def _simplex_grid(numpts):
    x = np.linspace(0, TWO_PI, numpts)
    xv, yv = np.meshgrid(x, x)
    mask = xv + yv <= TWO_PI
    th = np.stack([xv[mask], yv[mask], np.maximum(TWO_PI - xv[mask] - yv[mask], 0.0)], -1)
    return th, int(mask.size - mask.sum())


def check_rk1comp(a=0.01, numpts=100, D=DEFAULT_DEPTH):
    """Deficit plus .3 p I_1(a)/I_0(a) must be non-positive on the simplex grid.

    ``a`` is passed straight to the Bessel functions, as in the listing.
    The margin is ``-(deficit + .3 p ratio)``; the equal-angle point is excluded.
    """
    t0 = time.perf_counter()
    th, masked = _simplex_grid(numpts)
    p = squared_deficit(th)
    keep = p > 1e-20
    th, p = th[keep], p[keep]
    ratio = float(lambda_values(a, 1)[1])
    zv = arc_deficit_series(a, th, D)
    margin = -(zv + 0.3 * p * ratio)
    grid = GridSpec([("theta1", 0.0, TWO_PI, numpts), ("theta2", 0.0, TWO_PI, numpts)])
    j = int(np.argmin(margin))
    return _report(f"rk1comp(a={a:g})", grid, margin, lambda i: {"theta": th[i].tolist()}, t0,
                   excluded=masked + int((~keep).sum()), uncertainty=4 * arc_F_uncertainty(a, D),
                   details={"a": a, "normalized_min_margin": float(margin[j] / p[j]),
                            "pass_criterion": "inferred: no grid point with deficit + .3 p I1/I0 > 0"})


def _lastlem_ratio(theta):
    theta = np.asarray(theta, dtype=float)
    zv = np.sum((np.sin(theta / 2) - math.sqrt(3) / 2) ** 2, -1)
    return zv / squared_deficit(theta)


def check_lastlem(numpts=200):
    """sum (sin(theta_i/2) - sqrt3/2)^2 <= 4.715 sum (theta_i/2pi - 1/3)^2, and .9555 >= 2(4.715)/pi^2.

    The report also carries the ratio at (pi, 0, pi), which is not a node of
    an even-sized grid.
    """
    t0 = time.perf_counter()
    th, masked = _simplex_grid(numpts)
    zv = np.sum((np.sin(th / 2) - math.sqrt(3) / 2) ** 2, -1)
    zz = squared_deficit(th)
    keep = zz > 1e-20
    margin = (4.715 * zz - zv)[keep]
    thk = th[keep]
    const_margin = 0.9555 - 2 * 4.715 / math.pi ** 2
    corner = float(_lastlem_ratio([math.pi, 0.0, math.pi]))
    rep = _report("lastlem", GridSpec([("theta1", 0.0, TWO_PI, numpts), ("theta2", 0.0, TWO_PI, numpts)]),
                  margin, lambda i: {"theta": thk[i].tolist()}, t0,
                  excluded=masked + int((~keep).sum()), uncertainty=1e-15,
                  details={"constant_margin": const_margin,
                           "ratio_at_pi_0_pi": corner,
                           "constant_margin_with_ratio_at_pi_0_pi": 0.9555 - 2 * corner / math.pi ** 2})
    if const_margin <= 0:
        rep.verdict = "fail"
    if corner > 4.715:
        rep.warnings.append(f"off-grid point (pi, 0, pi) has ratio {corner:.7f} > 4.715")
    return rep


def convbd2_transform(rho, r, nodes=200, angles=128):
    """T_rho f at (r, 0) with f(x) = (rho r |x|/(1-rho^2)) exp(-rho r |x|/(1-rho^2)).

    Polar quadrature centred on the origin, where f has its kink: Gauss-Legendre
    in the radius and the trapezoid rule (spectrally accurate) in the angle.
    """
    q = 1 - rho * rho
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t, w = leggauss(nodes)
    th = np.arange(angles) * TWO_PI / angles
    out = np.empty_like(r)
    for i, rr in enumerate(r):
        k = rho * rr / q
        tmax = rho * rr + 14 * math.sqrt(q)
        s = (t + 1) * tmax / 2
        ws = w * tmax / 2
        d2 = (s[:, None] * np.cos(th) - rho * rr) ** 2 + (s[:, None] * np.sin(th)) ** 2
        dens = np.exp(-d2 / (2 * q)) / (TWO_PI * q)
        f = k * s * np.exp(-k * s)
        out[i] = np.sum((ws * s * f)[:, None] * dens) * TWO_PI / angles
    return out


def convbd2_transform_bessel(rho, r):
    """Same quantity by the one-dimensional Bessel reduction (adaptive quadrature)."""
    q = 1 - rho * rho
    k = rho * r / q

    def g(t):
        return k * t * math.exp(-k * t) * t / q * math.exp(-(t - rho * r) ** 2 / (2 * q)) \
            * float(bessel_i(0, rho * r * t / q, scaled=True))

    return integrate.quad(g, 0, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)[0]


def check_convbd2(rho=0.05, r_max=10.0, count=1000):
    """T_rho f(r, 0) >= 1.2 (rho r/(1-rho^2)) exp(-(1.1 rho r)^2/(1-rho^2) - 1.1 rho r/(1-rho^2))."""
    t0 = time.perf_counter()
    q = 1 - rho * rho
    r = np.linspace(0, r_max, count)[1:]
    val = convbd2_transform(rho, r)
    lb = 1.2 * (rho * r / q) * np.exp(-(1.1 * rho * r) ** 2 / q - 1.1 * rho * r / q)
    margin = val - lb
    return _report(f"convbd2(rho={rho:g})", GridSpec([("r", 0.0, r_max, count)]), margin,
                   lambda i: {"r": float(r[i])}, t0, excluded=1, uncertainty=1e-14,
                   details={"rho": rho, "note": "full-plane integral; the listing truncates to [-10,10]^2"})


def check_neg_linear(a=10.0, numpts=140, D=DEFAULT_DEPTH):
    """Sign-carrying deficit must not fall in (0, con p), con = a e^{-a}/125.3.

    The listing tests only points with positive deficit against ``con p``.
    The margin is ``zv - con p`` at those points and ``-zv`` elsewhere, so a
    negative margin is exactly a point the listing would flag. ``a`` may be a
    sequence; the minimum over all values is reported.
    """
    t0 = time.perf_counter()
    values = np.atleast_1d(np.asarray(a, dtype=float))
    th, masked = _simplex_grid(numpts)
    p = np.sum((th - TWO_PI / 3) ** 2, -1)
    keep = p > 1e-20
    th, p = th[keep], p[keep]
    d = np.arange(1, D + 1)
    s3 = np.sin(d * math.pi / 3)
    margins, pts, positive, per_a = [], [], {}, {}
    for av in values:
        lam = lambda_values(av, D)[1:]

        def F(x):
            return 2 / math.pi ** 2 * np.sum(lam * np.sin(np.asarray(x)[..., None] * d / 2) * s3 / d ** 2, -1)

        zv = -3 * F(TWO_PI / 3) + np.sum(F(th), -1)
        con = av * math.exp(-av) / 125.3
        m = np.where(zv > 0, zv - con * p, -zv)
        positive[f"{av:g}"] = int((zv > 0).sum())
        per_a[f"{av:g}"] = float(m.min())
        margins.append(m)
        pts.extend({"a": float(av), "theta": t.tolist()} for t in th)
    return _report("neg_linear(a=" + ",".join(f"{v:g}" for v in values) + ")",
                   GridSpec([("theta1", 0.0, TWO_PI, numpts), ("theta2", 0.0, TWO_PI, numpts)]),
                   np.concatenate(margins), lambda i: pts[i], t0,
                   excluded=masked + int((~keep).sum()),
                   uncertainty=4 * arc_F_uncertainty(float(values.max()), D),
                   details={"min_margin_by_a": per_a, "positive_deficit_points": positive})


# ---------------------------------------------------------------- constant lemmas

def lemma28_closed_form(rho, alpha=-0.5):
    """Three-part closed form of the radial integral bound (weights r/1.7, r, 2/rho)."""
    q = 1 - rho * rho
    u = 1 / (1 + rho) - 0.5
    v = 1 / (1 - rho) - 0.5
    A = 1 / (2 * q) / 1.7 * (-2 * q * (1 - alpha ** 2 * rho ** 2) + 1 / (2 * u) + 1 / (2 * v))
    B = 1 / (2 * q) * (1 - 1 / 1.7) * (
        -2 * q * (1 - alpha ** 2 * rho ** 2 - alpha) * (-math.exp(-1 / (2 * rho ** 2)))
        + 1 / (2 * u) * (-math.exp(-u / rho ** 2))
        + 1 / (2 * v) * (-math.exp(-v / rho ** 2)))
    C = 1 / rho / q * math.sqrt(math.pi / 2) * (
        -2 * q * (1 - alpha ** 2 * rho ** 2 - alpha * rho ** 2) + 1 / math.sqrt(2 * u) + 1 / math.sqrt(2 * v))
    return A + B + C


def lemma28_integral(rho, alpha=-0.5):
    """The radial integral the closed form evaluates, by adaptive quadrature."""
    q = 1 - rho * rho
    u = 1 / (1 + rho) - 0.5
    v = 1 / (1 - rho) - 0.5

    def bracket(r):
        return (-2 * q * (1 - alpha ** 2 * rho ** 2 + 2 * alpha * rho ** 2 * (r * r / 2 - 1)) * math.exp(-r * r / 2)
                + math.exp(-r * r * u) + math.exp(-r * r * v)) / (2 * q)

    def weight(r):
        return (r / 1.7 if r < 1 / rho else r) + 2 / rho

    lo = integrate.quad(lambda r: weight(r) * bracket(r), 0, 1 / rho, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    hi = integrate.quad(lambda r: weight(r) * bracket(r), 1 / rho, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return lo + hi


def lemma28_restricted(rho, alpha=-0.5, nodes=400, angles=256):
    """The even-index Hermite sum itself, with the exact weight 1/(1 - e^{-rho|x|/2}).

    Uses the 1-D Mehler kernel to sum over k in (2N)^2 in closed form, then
    integrates in polar coordinates. This is the quantity the lemma needs,
    before any of the weight bounds are applied.
    """
    q = 1 - rho * rho
    t, w = leggauss(nodes)
    rmax = 14.0
    r = (t + 1) * rmax / 2
    wr = w * rmax / 2
    th = np.arange(angles) * TWO_PI / angles
    R, T = np.meshgrid(r, th, indexing="ij")
    x1, x2 = R * np.cos(T), R * np.sin(T)

    def even(x):
        return 0.5 * (np.exp(x * x * (rho - rho * rho) / q) + np.exp(-x * x * (rho + rho * rho) / q)) / math.sqrt(q)

    S = even(x1) * even(x2) - 1 + rho ** 2 * (-4 * alpha * (x1 * x1 - 1) / 2 + 2 * alpha ** 2)
    g = np.exp(-R * R / 2) / TWO_PI
    return float(np.sum(S * g / (-np.expm1(-rho * R / 2)) * R * wr[:, None]) * TWO_PI / angles)


def _rho_grid(named, lo, hi, count):
    return np.unique(np.concatenate([np.asarray(named, dtype=float), np.linspace(lo, hi, count)]))


def check_lemma28_constant(rhos=None, alpha=-0.5):
    """Closed form of the radial bound must not exceed 2.5(rho + rho^2) for rho < 1/7."""
    t0 = time.perf_counter()
    rhos = _rho_grid([0.01, 0.05, 0.1, 0.14], 0.002, 0.142, 50) if rhos is None else np.asarray(rhos, float)
    closed = np.array([lemma28_closed_form(p, alpha) for p in rhos])
    quad = np.array([lemma28_integral(p, alpha) for p in rhos])
    bound = 2.5 * (rhos + rhos ** 2)
    margin = bound - closed
    ratio = closed / rhos
    rep = _report("lemma28_constant", GridSpec([("rho", float(rhos.min()), float(rhos.max()), rhos.size)]),
                  margin, lambda i: {"rho": float(rhos[i])}, t0,
                  uncertainty=float(np.max(np.abs(closed - quad))),
                  details={
                      "values": {f"{p:g}": float(v) for p, v in zip(rhos, closed)},
                      "max_closed_vs_quadrature": float(np.max(np.abs(closed - quad))),
                      "smallest_constant_c_with_value_le_c(rho+rho^2)": float(np.max(closed / (rhos + rhos ** 2))),
                      "value_over_rho_at_smallest_rho": float(ratio[0]),
                      "small_rho_limit_of_value_over_rho": 2.5 * math.sqrt(math.pi / 2),
                  })
    if rep.verdict == "fail":
        rep.warnings.append("closed form exceeds 2.5(rho+rho^2); its small-rho slope is 2.5*sqrt(pi/2)")
    return rep


def _gauss_J0(P, b):
    """int_0^inf exp(-P r^2 + b r) dr."""
    z = -b / (2 * math.sqrt(P))
    return 0.5 * math.sqrt(math.pi / P) * math.exp(b * b / (4 * P) - z * z) * float(erfcx(z)) if z >= 0 \
        else 0.5 * math.sqrt(math.pi / P) * math.exp(b * b / (4 * P)) * float(erfc(z))


def _gauss_J2(P, b):
    """int_0^inf r^2 exp(-P r^2 + b r) dr."""
    m = b / (2 * P)
    return (m * m + 1 / (2 * P)) * _gauss_J0(P, b) + m / (2 * P)


def lemma29_integral(rho, sign=1):
    """(1/rho) int e^{s(c^2 r^2 + c r)/q}[e^{-r^2(1/2-rho+rho^2/2)/q} - q(1+rho r^2) e^{-r^2/2}] dr, c = 1.1 rho.

    ``sign=+1`` uses the exact reciprocal of the weight; ``sign=-1`` is the
    form written with the exponent negated.
    """
    c = 1.1 * rho
    q = 1 - rho * rho

    def f(r):
        e = sign * ((c * r) ** 2 / q + c * r / q)
        return math.exp(e - r * r * (0.5 - rho + rho * rho / 2) / q) - q * (1 + rho * r * r) * math.exp(e - r * r / 2)

    return integrate.quad(f, 0, np.inf, epsabs=1e-15, epsrel=1e-12, limit=400)[0] / rho


def lemma29_closed_form(rho, sign=1):
    """Gaussian-tail closed form of :func:`lemma29_integral`."""
    c = 1.1 * rho
    q = 1 - rho * rho
    b = sign * c / q
    P1 = (0.5 - rho + rho * rho / 2 - sign * c * c) / q
    P2 = 0.5 - sign * c * c / q
    return (_gauss_J0(P1, b) - q * _gauss_J0(P2, b) - q * rho * _gauss_J2(P2, b)) / rho


def lemma29_displayed(rho):
    """The bracketed Gaussian-tail expression exactly as displayed."""
    c = 1.1 * rho
    q = 1 - rho * rho
    A1 = c * c + 0.5 - rho + rho * rho / 2
    A2 = c * c + 0.5

    def tail(L):
        return math.sqrt(math.pi) / 2 * float(erfc(L))

    L2 = c * math.sqrt(A2) / math.sqrt(q)
    e2 = math.exp(c * c / (4 * A2 * q))
    t1 = math.exp(c * c / (4 * A1 * q)) * math.sqrt(q / A1) * tail(c * math.sqrt(A1) / math.sqrt(q))
    t2 = q * e2 * math.sqrt(q / A2) * tail(L2)
    t3 = q * rho * ((2 * (A2 / q) + (c / q) ** 2) / 4 * e2 * (q / A2) ** 2.5 * tail(L2)
                    + (-c / q) / (2 * (A2 / q) ** 2))
    return (t1 - t2 - t3) / rho


def check_lemma29_constant(rhos=None):
    """The degree >= 2 Hermite weight sum must not exceed 5 rho + 8 rho^2 for rho < .1.

    The verdict uses the exact reciprocal weight (quadrature, cross-checked by
    its closed form). The negated-exponent form and the displayed closed form
    are reported alongside.
    """
    t0 = time.perf_counter()
    rhos = _rho_grid([0.01, 0.05, 0.09], 0.001, 0.0999, 100) if rhos is None else np.asarray(rhos, float)
    quad = np.array([lemma29_integral(p, 1) for p in rhos])
    closed = np.array([lemma29_closed_form(p, 1) for p in rhos])
    neg = np.array([lemma29_integral(p, -1) for p in rhos])
    shown = np.array([lemma29_displayed(p) for p in rhos])
    bound = 5 * rhos + 8 * rhos ** 2
    margin = bound - quad
    rep = _report("lemma29_constant", GridSpec([("rho", float(rhos.min()), float(rhos.max()), rhos.size)]),
                  margin, lambda i: {"rho": float(rhos[i])}, t0,
                  uncertainty=float(np.max(np.abs(quad - closed))),
                  details={
                      "min_margin_negated_exponent_form": float(np.min(bound - neg)),
                      "min_margin_displayed_closed_form": float(np.min(bound - shown)),
                      "ratio_value_to_bound_at_smallest_rho": float(quad[0] / bound[0]),
                      "values": {f"{p:g}": float(v) for p, v in zip(rhos, quad)},
                  })
    if np.min(bound - shown) <= 0:
        rep.warnings.append("the displayed closed form exceeds the bound; it does not equal its own integral")
    return rep


def lemma29z_raw(rho):
    """Odd-degree Hermite weight sum (closed Gaussian-tail form)."""
    q = 1 - rho * rho
    total = 0.0
    for s in (1, -1):
        B = 1 - 2 * s * rho - 1.42 * rho * rho
        lo = -1.1 * rho / (math.sqrt(B) * math.sqrt(q))
        total += s / (2 * rho) * math.exp((1.1 * rho) ** 2 / (2 * B * q)) * math.sqrt(q / B) \
            * math.sqrt(math.pi / 2) * float(erfc(lo / math.sqrt(2)))
    return total


def lemma29z_alpha(rho, prefactor=None):
    """The degree-one term subtracted from the raw sum.

    ``prefactor`` multiplies the exponential weight; the reciprocal of the
    weight function gives ``1 - rho^2``.
    """
    q = 1 - rho * rho
    pref = q if prefactor is None else prefactor
    c = 1.1 * rho
    f = lambda r: 0.5 * r * r * math.exp(c * r / q + (c * r) ** 2 / q - r * r / 2)
    return pref * integrate.quad(f, 0, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)[0]


def check_lemma29z_constant(rhos=None):
    """raw <= 2.5 rho + sqrt(pi/2), alpha >= (sqrt(pi/2) + 2.3 rho)/2, net <= sqrt(pi/2)/2 + 1.35 rho."""
    t0 = time.perf_counter()
    rhos = _rho_grid([0.005, 0.015, 0.027], 0.0005, 0.0277, 56) if rhos is None else np.asarray(rhos, float)
    s = math.sqrt(math.pi / 2)
    raw = np.array([lemma29z_raw(p) for p in rhos])
    alpha = np.array([lemma29z_alpha(p) for p in rhos])
    alpha_lit = np.array([lemma29z_alpha(p, 1 - p) for p in rhos])
    m_raw = 2.5 * rhos + s - raw
    m_alpha = alpha - 0.5 * (s + 2.3 * rhos)
    m_net = 0.5 * s + 1.35 * rhos - (raw - alpha)
    margin = np.minimum(np.minimum(m_raw, m_alpha), m_net)
    which = np.array(["raw", "alpha", "net"])[np.argmin(np.stack([m_raw, m_alpha, m_net]), axis=0)]
    rep = _report("lemma29z_constant", GridSpec([("rho", float(rhos.min()), float(rhos.max()), rhos.size)]),
                  margin, lambda i: {"rho": float(rhos[i]), "claim": str(which[i])}, t0,
                  uncertainty=1e-12,
                  details={
                      "min_margin_raw": float(m_raw.min()),
                      "min_margin_alpha": float(m_alpha.min()),
                      "min_margin_net": float(m_net.min()),
                      "min_margin_net_with_prefactor_1_minus_rho": float(
                          np.min(0.5 * s + 1.35 * rhos - (raw - alpha_lit))),
                      "alpha_slope_estimate": float((alpha[-1] - alpha[0]) / (rhos[-1] - rhos[0])),
                  })
    if m_alpha.min() <= 0:
        rep.warnings.append("the degree-one term is smaller than (sqrt(pi/2) + 2.3 rho)/2 on the grid")
    return rep


def check_cor1_scalar(x=None):
    """-x/(1/2 + sqrt(9/4 + x^2)) <= (3/4)(-1 + (1-k) e^{-x pi/2} + k e^{-x pi/6})."""
    t0 = time.perf_counter()
    if x is None:
        x = np.unique(np.concatenate([np.geomspace(1e-6, 1e-2, 200), np.linspace(0, 100, 10001)[1:]]))
    x = np.asarray(x, dtype=float)
    rhs = 0.75 * (-1 + (1 - _K) * np.exp(-x * math.pi / 2) + _K * np.exp(-x * math.pi / 6))
    lhs = -x / (0.5 + np.sqrt(2.25 + x * x))
    margin = rhs - lhs
    return _report("cor1_scalar", GridSpec([("x", float(x.min()), float(x.max()), x.size)]), margin,
                   lambda i: {"x": float(x[i])}, t0, uncertainty=1e-16,
                   details={"margin_over_x_squared_min": float(np.min(margin / (x * x)))})


def check_lemma10_conclusion(a_values=(0.1, 1.0, 10.0), numpts=60, D=DEFAULT_DEPTH):
    """Deficit <= -(13/(9 pi^2)) lambda_1 sum(theta_i/2pi - 1/3)^2 when theta_1 >= pi."""
    t0 = time.perf_counter()
    t1 = np.linspace(math.pi, TWO_PI, numpts)
    frac = np.linspace(0, 1, numpts)
    T1, Fr = np.meshgrid(t1, frac, indexing="ij")
    T2 = Fr * (TWO_PI - T1)
    th = np.stack([T1.ravel(), T2.ravel(), np.maximum(TWO_PI - T1 - T2, 0).ravel()], -1)
    margins, pts = [], []
    for a in a_values:
        m = lemma10_rhs(a, th) - arc_deficit_series(a, th, D)
        margins.append(m)
        pts.extend({"a": a, "theta": t.tolist()} for t in th)
    margins = np.concatenate(margins)
    unc = 4 * max(arc_F_uncertainty(a, D) for a in a_values)
    return _report("lemma10_conclusion", GridSpec([("theta1", math.pi, TWO_PI, numpts),
                                                   ("theta2_fraction", 0.0, 1.0, numpts),
                                                   ("a", min(a_values), max(a_values), len(a_values))]),
                   margins, lambda i: pts[i], t0, uncertainty=unc)


def check_lemma7_property(a_values=(0.1, 1.0, 10.0, 50.0), numpts=140, D=DEFAULT_DEPTH):
    """Deficit <= .158 (-1 + (1-k)e^{-a pi/2} + k e^{-a pi/6}) sum(theta_i/2pi - 1/3)^2 when all theta_i <= pi."""
    t0 = time.perf_counter()
    th, _ = _simplex_grid(numpts)
    th = th[np.all(th <= math.pi + 1e-12, axis=1)]
    p = squared_deficit(th)
    th = th[p > 1e-20]
    margins, pts = [], []
    for a in a_values:
        margins.append(lemma7_rhs(a, th) - arc_deficit_series(a, th, D))
        pts.extend({"a": a, "theta": t.tolist()} for t in th)
    return _report("lemma7_property", GridSpec([("theta1", 0.0, TWO_PI, numpts), ("theta2", 0.0, TWO_PI, numpts)]),
                   np.concatenate(margins), lambda i: pts[i], t0,
                   uncertainty=4 * max(arc_F_uncertainty(a, D) for a in a_values))


def check_three1(a_values=None, D=DEFAULT_DEPTH):
    """Three 120-degree arcs beat two half circles: left sum minus right sum minus tail > 0."""
    t0 = time.perf_counter()
    a_values = np.geomspace(1e-3, 50, 60) if a_values is None else np.asarray(a_values, float)
    m = []
    for a in a_values:
        left, right, tail = three1_sides(a, D)
        m.append(left - right - tail)
    return _report("three1", GridSpec([("a", float(a_values.min()), float(a_values.max()), a_values.size)]),
                   np.array(m), lambda i: {"a": float(a_values[i])}, t0)


# ---------------------------------------------------------------- registry

# name -> (function, default keyword arguments)
CHECKS = {
    "two8": (check_two8, {"rho": 0.1, "c": 0.109}),
    "two8_c3": (check_two8, {"rho": 0.04, "c": 0.3}),
    "rk1comp": (check_rk1comp, {"a": 0.01}),
    "rk1comp_endpoint": (check_rk1comp, {"a": 0.1}),
    "lastlem": (check_lastlem, {}),
    "convbd2": (check_convbd2, {"rho": 0.05}),
    "neg_linear": (check_neg_linear, {"a": 10.0}),
    "neg_linear_sweep": (check_neg_linear, {"a": [0.1, 1.0, 10.0, 50.0]}),
    "lemma28": (check_lemma28_constant, {}),
    "lemma29": (check_lemma29_constant, {}),
    "lemma29z": (check_lemma29z_constant, {}),
    "cor1": (check_cor1_scalar, {}),
    "lemma10": (check_lemma10_conclusion, {}),
    "lemma7": (check_lemma7_property, {}),
    "three1": (check_three1, {}),
}

GROUPS = {
    "replicas": ["two8", "two8_c3", "rk1comp", "rk1comp_endpoint", "lastlem", "convbd2", "neg_linear"],
    "constants": ["lemma28", "lemma29", "lemma29z", "cor1", "lemma10"],
    "properties": ["neg_linear_sweep", "lemma7", "three1"],
}
GROUPS["all"] = GROUPS["replicas"] + GROUPS["constants"] + GROUPS["properties"]


# how a one-axis grid override maps onto each check's keywords
_GRID_KEYWORDS = {
    check_two8: lambda lo, hi, n: {"r_max": hi, "count": n},
    check_convbd2: lambda lo, hi, n: {"r_max": hi, "count": n},
    check_cor1_scalar: lambda lo, hi, n: {"x": np.linspace(lo, hi, n)},
    check_lemma28_constant: lambda lo, hi, n: {"rhos": np.linspace(lo, hi, n)},
    check_lemma29_constant: lambda lo, hi, n: {"rhos": np.linspace(lo, hi, n)},
    check_lemma29z_constant: lambda lo, hi, n: {"rhos": np.linspace(lo, hi, n)},
    check_rk1comp: lambda lo, hi, n: {"numpts": n},
    check_lastlem: lambda lo, hi, n: {"numpts": n},
    check_neg_linear: lambda lo, hi, n: {"numpts": n},
    check_lemma7_property: lambda lo, hi, n: {"numpts": n},
    check_lemma10_conclusion: lambda lo, hi, n: {"numpts": n},
    check_three1: lambda lo, hi, n: {"a_values": np.geomspace(max(lo, 1e-6), hi, n)},
}


def grid_overrides(name, lo, hi, count):
    """Keyword arguments that put check ``name`` on a grid with ``count`` points."""
    fn = CHECKS[name][0]
    if fn not in _GRID_KEYWORDS:
        raise ValueError(f"check {name} has no adjustable grid")
    return _GRID_KEYWORDS[fn](lo, hi, count)


def run_check(name, **overrides) -> CheckReport:
    if name not in CHECKS:
        raise KeyError(name)
    fn, defaults = CHECKS[name]
    rep = fn(**{**defaults, **overrides})
    rep.details.setdefault("check", name)
    return rep


def stability_warning(name, factor=2):
    """Rerun ``name`` on a grid ``factor`` times finer and compare.

    Returns a message if the verdict flips or the minimum margin moves by
    more than 10%, else None.
    """
    fn, defaults = CHECKS[name]
    base = run_check(name)
    axes = base.grid.axes
    if fn not in _GRID_KEYWORDS or not axes:
        return None
    lo, hi, n = axes[0][1], axes[0][2], axes[0][3]
    fine = run_check(name, **grid_overrides(name, lo, hi, factor * (n - 1) + 1))
    if fine.verdict != base.verdict:
        return f"{name}: verdict changes from {base.verdict} to {fine.verdict} on a finer grid"
    if abs(fine.min_margin - base.min_margin) > 0.1 * abs(base.min_margin):
        return f"{name}: min margin moves from {base.min_margin:.3g} to {fine.min_margin:.3g} on a finer grid"
    return None


def run_group(name, jobs=1):
    names = GROUPS[name] if name in GROUPS else [name]
    if jobs <= 1:
        return [run_check(n) for n in names]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(jobs) as ex:
        return list(ex.map(run_check, names))
