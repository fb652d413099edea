"""Gaussian noise stability in the plane.

Covers the Mehler kernel, the Ornstein-Uhlenbeck operator, the closed-form
stability of three 120-degree sectors, and quadrature stability of
partitions whose sections by circles are arcs ("radial-arc profiles").

A profile is piecewise constant in the radius. Cell ``j`` covers
``[edges[j], edges[j+1])`` and on that annulus the three sets meet each
circle in consecutive arcs of lengths ``theta[j]``, starting at angle
``offset[j]``. Stability is computed by splitting the correlated pair into
radii (R, S) and angles. Given the radii, the angular part is diagonal in
the Fourier basis with eigenvalues from
:func:`nsl.spherical_stability.lambda_values`.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .special_functions import bessel_i, exp_times_tail, gaussian_tail, hermite
from .spherical_stability import DEFAULT_DEPTH, lambda_envelopes, lambda_values

__all__ = [
    "ResolutionError",
    "GridError",
    "StabilityValue",
    "RadialPartitionProfile",
    "MIN_CELLS",
    "DEFAULT_CELLS",
    "R_MAX",
    "mehler_kernel",
    "mehler_hermite_expansion",
    "ou_apply",
    "cone_partition_stability",
    "profile_stability",
    "bilinear_profile_stability",
    "profile_stability_mc",
    "penalty_functional",
    "radial_expectation",
    "tphi_lower_bound",
    "phi_weight",
    "two10_report",
    "eight1_report",
    "random_balanced_profile",
]

MIN_CELLS = 16
DEFAULT_CELLS = 64
R_MAX = 8.0
TWO_PI = 2 * math.pi


class ResolutionError(ValueError):
    """Radial grid too coarse for the quadrature budget."""


class GridError(ValueError):
    """Two profiles do not share a radial grid."""


@dataclass(frozen=True)
class StabilityValue:
    value: float
    uncertainty: float = 0.0
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.uncertainty >= 0:
            raise ValueError("uncertainty must be non-negative")

    def as_dict(self):
        out = {"value": self.value, "uncertainty": self.uncertainty}
        if self.components:
            out["components"] = dict(self.components)
        return out


def _check_rho(rho):
    if not -1 < rho < 1:
        raise ValueError(f"rho must lie in (-1, 1), got {rho}")


# ---------------------------------------------------------------- kernels

def mehler_kernel(rho, x, y):
    """Joint density of a rho-correlated pair of standard Gaussians in R^2."""
    _check_rho(rho)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    q = 1 - rho * rho
    e = (-np.sum(x * x, -1) - np.sum(y * y, -1) + 2 * rho * np.sum(x * y, -1)) / (2 * q)
    return np.exp(e) / (TWO_PI ** 2 * q)


def mehler_hermite_expansion(rho, x, y, degree=20):
    """Truncated Hermite expansion of :func:`mehler_kernel`."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hx = [[hermite(m, x[j]) for m in range(degree + 1)] for j in range(2)]
    hy = [[hermite(m, y[j]) for m in range(degree + 1)] for j in range(2)]
    total = 0.0
    for d in range(degree + 1):
        for k1 in range(d + 1):
            k2 = d - k1
            total += (rho ** d * math.factorial(k1) * math.factorial(k2)
                      * hx[0][k1] * hy[0][k1] * hx[1][k2] * hy[1][k2])
    g = np.exp(-0.5 * (x @ x + y @ y)) / TWO_PI ** 2
    return total * g


def ou_apply(rho, f, x, nodes=64, method="hermite", tol=1e-10):
    """T_rho f(x) = E f(rho x + sqrt(1-rho^2) Z).

    ``f`` takes two coordinate arrays and returns an array of values.
    ``method="hermite"`` uses a tensor Gauss-Hermite rule with ``nodes`` points
    per axis and accepts an array of points with trailing axis 2; it converges
    fast for smooth ``f``. ``method="adaptive"`` integrates a single point by
    adaptive quadrature over [-12, 12]^2 and is the one to use for indicators.
    """
    _check_rho(rho)
    x = np.asarray(x, dtype=float)
    c = math.sqrt(1 - rho * rho)
    if method == "adaptive":
        if x.shape != (2,):
            raise ValueError("adaptive method takes a single point")
        g = lambda z2, z1: float(f(rho * x[0] + c * z1, rho * x[1] + c * z2)) \
            * math.exp(-(z1 * z1 + z2 * z2) / 2) / TWO_PI
        return integrate.dblquad(g, -12, 12, -12, 12, epsabs=tol, epsrel=tol)[0]
    if method != "hermite":
        raise ValueError("method must be 'hermite' or 'adaptive'")
    t, w = hermegauss(nodes)
    w = w / math.sqrt(TWO_PI)
    y1 = rho * x[..., 0, None, None] + c * t[:, None]
    y2 = rho * x[..., 1, None, None] + c * t[None, :]
    vals = np.asarray(f(y1, y2), dtype=float)
    out = np.einsum("...ij,i,j->...", np.broadcast_to(vals, np.broadcast_shapes(y1.shape, y2.shape)), w, w)
    return float(out) if out.ndim == 0 else out


def cone_partition_stability(rho) -> StabilityValue:
    """Stability of three 120-degree sectors."""
    _check_rho(rho)
    v = 3 * (1 / 9 + (math.acos(-rho) ** 2 - math.acos(rho / 2) ** 2) / (4 * math.pi ** 2))
    return StabilityValue(v, 0.0)


# ---------------------------------------------------------------- profiles

def _cell_nodes(edges, step=0.25, min_nodes=4):
    """Gauss-Legendre nodes inside every cell; returns (nodes, weights, cell)."""
    rs, ws, cs = [], [], []
    for j in range(len(edges) - 1):
        lo, hi = edges[j], edges[j + 1]
        n = max(min_nodes, int(math.ceil((hi - lo) / step)))
        t, w = leggauss(n)
        rs.append(lo + (t + 1) * (hi - lo) / 2)
        ws.append(w * (hi - lo) / 2)
        cs.append(np.full(n, j))
    return np.concatenate(rs), np.concatenate(ws), np.concatenate(cs)


class RadialPartitionProfile:
    """Three-set partition of the plane whose circle sections are arcs.

    Parameters
    ----------
    radii : array_like, shape (M,)
        Representative radius of each cell, strictly increasing.
    theta : array_like, shape (M, 3)
        Arc lengths per cell, each row summing to 2*pi.
    offset : array_like, shape (M,), optional
        Starting angle of the first arc per cell.
    edges : array_like, shape (M+1,), optional
        Cell boundaries. Defaults to midpoints between radii, with 0 at the
        bottom and ``max(8, last radius + half gap)`` at the top.
    """

    def __init__(self, radii, theta, offset=None, edges=None):
        radii = np.asarray(radii, dtype=float)
        theta = np.asarray(theta, dtype=float)
        M = radii.size
        if radii.ndim != 1 or theta.shape != (M, 3):
            raise ValueError(f"theta must have shape ({M}, 3), got {theta.shape}")
        if M < MIN_CELLS:
            raise ResolutionError(f"profile has {M} radial cells, need at least {MIN_CELLS}")
        if np.any(np.diff(radii) <= 0) or radii[0] < 0:
            raise ValueError("radii must be non-negative and strictly increasing")
        if np.any(theta < -1e-12) or np.any(np.abs(theta.sum(1) - TWO_PI) > 1e-9):
            raise ValueError("each theta row must be non-negative and sum to 2*pi")
        offset = np.zeros(M) if offset is None else np.asarray(offset, dtype=float)
        if offset.shape != (M,):
            raise ValueError(f"offset must have shape ({M},)")
        if edges is None:
            mid = (radii[1:] + radii[:-1]) / 2
            top = max(R_MAX, radii[-1] + (radii[-1] - radii[-2]) / 2)
            edges = np.concatenate([[0.0], mid, [top]])
        edges = np.asarray(edges, dtype=float)
        if edges.shape != (M + 1,) or edges[0] != 0 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must start at 0 and increase, one more than radii")
        if edges[-1] < R_MAX:
            raise ResolutionError(f"radial grid must reach {R_MAX}, stops at {edges[-1]}")
        self.radii = radii
        self.theta = np.clip(theta, 0, None)
        self.offset = offset
        self.edges = edges
        self.nodes, self.weights, self.cell = _cell_nodes(edges)

    # constructors
    @classmethod
    def constant(cls, theta=(TWO_PI / 3,) * 3, offset=0.0, M=DEFAULT_CELLS, r_max=R_MAX):
        edges = np.linspace(0, r_max, M + 1)
        radii = (edges[1:] + edges[:-1]) / 2
        return cls(radii, np.tile(theta, (M, 1)), np.full(M, float(offset)), edges)

    @classmethod
    def sectors(cls, M=DEFAULT_CELLS):
        return cls.constant(M=M)

    @classmethod
    def from_function(cls, fn, M=DEFAULT_CELLS, r_max=R_MAX):
        """Sample ``fn(r) -> (theta, offset)`` at the midpoints of M equal cells."""
        edges = np.linspace(0, r_max, M + 1)
        radii = (edges[1:] + edges[:-1]) / 2
        th, off = zip(*(fn(r) for r in radii))
        return cls(radii, np.array(th), np.array(off), edges)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        missing = [k for k in ("radii", "theta") if k not in data]
        if missing:
            raise ValueError(f"profile JSON missing key(s): {', '.join(missing)}")
        return cls(data["radii"], data["theta"], data.get("offset"), data.get("edges"))

    def to_json(self):
        return json.dumps({
            "radii": self.radii.tolist(),
            "theta": self.theta.tolist(),
            "offset": self.offset.tolist(),
            "edges": self.edges.tolist(),
        })

    def antipodal(self):
        """The partition x -> -x: every arc rotated by pi."""
        return RadialPartitionProfile(self.radii, self.theta, self.offset + math.pi, self.edges)

    @property
    def M(self):
        return self.radii.size

    @property
    def means(self):
        """c_i(r) per cell, shape (M, 3)."""
        return self.theta / TWO_PI

    def cell_masses(self):
        e = self.edges
        m = np.exp(-e[:-1] ** 2 / 2) - np.exp(-e[1:] ** 2 / 2)
        return m

    def measures(self):
        """Gaussian measure of each of the three sets (cells beyond the top edge ignored)."""
        return self.cell_masses() @ self.means

    def fourier(self, D):
        """Arc integrals of exp(i d x), shape (M, 3, D)."""
        start = self.offset[:, None] + np.concatenate(
            [np.zeros((self.M, 1)), np.cumsum(self.theta, 1)[:, :2]], axis=1)
        stop = start + self.theta
        d = np.arange(1, D + 1)
        return (np.exp(1j * stop[..., None] * d) - np.exp(1j * start[..., None] * d)) / (1j * d)

    def label(self, points):
        """Index 0, 1 or 2 of the set containing each point (trailing axis 2)."""
        points = np.asarray(points, dtype=float)
        r = np.hypot(points[..., 0], points[..., 1])
        ang = np.arctan2(points[..., 1], points[..., 0])
        j = np.clip(np.searchsorted(self.edges, r, side="right") - 1, 0, self.M - 1)
        rel = np.mod(ang - self.offset[j], TWO_PI)
        b1 = self.theta[j, 0]
        b2 = b1 + self.theta[j, 1]
        return np.where(rel < b1, 0, np.where(rel < b2, 1, 2))

    def same_grid(self, other):
        return self.edges.shape == other.edges.shape and np.allclose(self.edges, other.edges, rtol=0, atol=1e-14)


def _pair_weights(rho, r, w):
    """w_j w_k p(r_j, r_k) for the joint density of (|X|, |Y|)."""
    q = 1 - rho * rho
    R, S = np.meshgrid(r, r, indexing="ij")
    a = abs(rho) * R * S / q
    p = (R * S / q) * np.exp(-(R * R + S * S - 2 * a * q) / (2 * q)) * bessel_i(0, a, scaled=True)
    return np.outer(w, w) * p, rho * R * S / q


def _bilinear(rho, A, B, D):
    q = 1 - rho * rho
    if not A.same_grid(B):
        raise GridError("profiles must share radial cell edges")
    r, w, cell = A.nodes, A.weights, A.cell
    W, a = _pair_weights(rho, r, w)
    mean_cells = A.means @ B.means.T
    zA, zB = A.fourier(D), B.fourier(D)
    K = np.einsum("jid,kid->jkd", zA, np.conj(zB)).real
    lam = lambda_values(a, D)[..., 1:]
    Kn = K[cell][:, cell]
    q0 = float(np.sum(W * mean_cells[cell][:, cell]))
    q1 = float(np.sum(W * lam[..., 0] * Kn[..., 0])) / (2 * math.pi ** 2)
    q2 = float(np.sum(W * np.sum(lam[..., 1:] * Kn[..., 1:], -1))) / (2 * math.pi ** 2)
    top = A.edges[-1]
    mass_err = abs(float(W.sum()) - 1.0)
    tail = 2 * math.exp(-top * top / 2)
    _, up_a, _, up_b = lambda_envelopes(np.abs(a), D + 1)
    trunc = 6 / math.pi ** 2 * float(np.sum(W * np.minimum(up_a, up_b))) / D
    unc = mass_err + tail + trunc
    comps = {"Q0": q0, "Q1": q1, "Q2": q2, "quadrature": mass_err, "tail": tail, "truncation": trunc}
    return StabilityValue(q0 + q1 + q2, unc, comps)


def profile_stability(rho, profile: RadialPartitionProfile, D=DEFAULT_DEPTH) -> StabilityValue:
    """sum_i int 1_{Omega_i} T_rho 1_{Omega_i} dgamma_2 for a radial-arc profile."""
    _check_rho(rho)
    return _bilinear(rho, profile, profile, D)


def bilinear_profile_stability(rho, profileA, profileB, D=DEFAULT_DEPTH) -> StabilityValue:
    """sum_i int 1_{Omega_i} T_rho 1_{Omega'_i} dgamma_2 with components Q0, Q1, Q2."""
    _check_rho(rho)
    return _bilinear(rho, profileA, profileB, D)


def profile_stability_mc(rho, profileA, profileB=None, samples=10 ** 7, seed=0, chunk=10 ** 6):
    """Monte Carlo estimate and standard error of the (bilinear) stability."""
    _check_rho(rho)
    profileB = profileA if profileB is None else profileB
    c = math.sqrt(1 - rho * rho)
    hits = 0
    done = 0
    block = 0
    while done < samples:
        n = min(chunk, samples - done)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
        X = rng.standard_normal((n, 2))
        Y = rho * X + c * rng.standard_normal((n, 2))
        hits += int(np.count_nonzero(profileA.label(X) == profileB.label(Y)))
        done += n
        block += 1
    p = hits / samples
    return p, math.sqrt(p * (1 - p) / samples)


def radial_expectation(profile, weight):
    """E_R[weight(R) * sum_i (c_i(R) - 1/3)^2] with R = |X|, X standard Gaussian."""
    r, w, cell = profile.nodes, profile.weights, profile.cell
    dev = np.sum((profile.means - 1 / 3) ** 2, axis=1)[cell]
    return float(np.sum(w * r * np.exp(-r * r / 2) * weight(r) * dev))


def penalty_functional(rho, profile) -> float:
    """int r (1 - e^{-rho r/2}) e^{-r^2/2} sum_i (c_i(r) - 1/3)^2 (3/2) dr."""
    if rho <= 0:
        raise ValueError("penalty is defined for rho > 0")
    return 1.5 * radial_expectation(profile, lambda r: -np.expm1(-rho * r / 2))


def tphi_lower_bound(rho, r):
    """Lower bound for T_rho phi at radius r, phi(x) = 1 - exp(-rho r |x| / (1-rho^2))."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    r = np.asarray(r, dtype=float)
    q = 1 - rho * rho
    out = (1 - np.exp(-rho * rho * r * r / (2 * q)) * gaussian_tail(0.0)
           - exp_times_tail(1.5 * rho * rho * r * r / q, 2 * rho * r / math.sqrt(q)))
    return float(out) if out.ndim == 0 else out


def phi_weight(rho, r):
    """rho r/(1-rho^2) exp(-(1.1 rho r)^2/(1-rho^2) - 1.1 rho r/(1-rho^2))."""
    q = 1 - rho * rho
    r = np.asarray(r, dtype=float)
    return rho * r / q * np.exp(-(1.1 * rho * r) ** 2 / q - 1.1 * rho * r / q)


def two10_report(rho, profile, c=None, D=DEFAULT_DEPTH):
    """Both sides of the positive-correlation stability inequality.

    ``lhs = stability(profile) - stability(sectors)`` and
    ``rhs = (2.5(rho+rho^2) - c) E_R (1 - e^{-R rho/2}) sum_i (c_i(R)-1/3)^2``.
    The constant ``c`` defaults to .109 below rho = .0418 and .3 above.
    """
    if c is None:
        c = 0.109 if rho < 0.0418 else 0.3
    st = profile_stability(rho, profile, D)
    lhs = st.value - cone_partition_stability(rho).value
    pen = radial_expectation(profile, lambda r: -np.expm1(-rho * r / 2))
    rhs = (2.5 * (rho + rho * rho) - c) * pen
    return {
        "rho": rho, "c": c, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs,
        "rhs_nonpositive": rhs <= 0, "uncertainty": st.uncertainty, "penalty": pen,
    }


def eight1_report(rho, profileA, profileB=None, D=DEFAULT_DEPTH):
    """Both sides of the negative-correlation inequality, with rho > 0.

    The second partition defaults to the antipode of the first, in which case
    the left side is the stability of ``profileA`` at ``-rho``.
    """
    if not 0 < rho < 1:
        raise ValueError("pass |rho|; the antipodal convention supplies the sign")
    profileB = profileA.antipodal() if profileB is None else profileB
    st = bilinear_profile_stability(rho, profileA, profileB, D)
    lhs = st.value - cone_partition_stability(-rho).value
    bracket = 0.3759 - 0.3 - 0.645 * rho - 2.5 * rho - 4 * rho * rho
    mA = profileA.measures()
    mean_term = float(np.sum((mA - 1 / 3) ** 2))
    phi = lambda r: phi_weight(rho, r)
    rhs = mean_term + bracket * (radial_expectation(profileA, phi) + radial_expectation(profileB, phi))
    return {
        "rho": rho, "lhs": lhs, "rhs": rhs, "margin": lhs - rhs, "bracket": bracket,
        "uncertainty": st.uncertainty, "components": st.components,
    }


def random_balanced_profile(rng, M=DEFAULT_CELLS, amplitude=None, rotate=True):
    """Random profile on equal-Gaussian-mass cells with each set of measure 1/3.

    Cell ``j < M-1`` covers radii with Rayleigh mass exactly 1/M; the last cell
    runs to ``R_MAX``. Cell means are 1/3 plus a zero-sum perturbation whose
    column sums vanish, so the measures stay balanced.
    """
    u = np.arange(M) / M
    inner = np.sqrt(-2 * np.log1p(-u[1:]))
    edges = np.concatenate([[0.0], inner, [max(R_MAX, inner[-1] + 1)]])
    radii = (edges[1:] + edges[:-1]) / 2
    delta = rng.standard_normal((M, 3))
    delta -= delta.mean(axis=1, keepdims=True)
    delta -= delta.mean(axis=0, keepdims=True)
    # keep every mean inside [0, 1]
    limit = (1 / 3) / np.max(np.abs(delta))
    amp = rng.uniform(0.2, 1.0) if amplitude is None else amplitude
    means = 1 / 3 + amp * limit * delta
    theta = TWO_PI * means
    theta[:, 2] = TWO_PI - theta[:, 0] - theta[:, 1]
    offset = rng.uniform(0, TWO_PI, M) if rotate else np.zeros(M)
    return RadialPartitionProfile(radii, theta, offset, edges)
