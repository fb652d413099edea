"""Noise stability of voting rules on {1..k}^n.

Votes are stored 0-based internally; lookup tables and JSON use row-major
base-k order over the 0-based votes, so row ``sum_i w_i k^(n-1-i)`` holds the
output for the vote vector ``w``.

Under the rho-correlated law each coordinate of the second vote vector keeps
its value with probability ``(1+(k-1)rho)/k`` and moves to each other value
with probability ``(1-rho)/k``. The single-coordinate transition matrix is
``rho I + (1-rho) J/k``, so exact stability is ``k^-n sum_j f_j . P^{(x)n} f_j``,
evaluated by applying ``P`` along one tensor axis at a time.
"""

from dataclasses import dataclass
import json
import math
from typing import Callable, Optional

import numpy as np

from .hardness_constants import plurality_limit

__all__ = [
    "EnumerationError",
    "NoiseKernel",
    "VotingRule",
    "ENUMERATION_CAP",
    "noise_stability_exact",
    "noise_stability_mc",
    "boolean_noise_stability",
    "majority_pm",
    "majority_stability_exact",
    "influence",
    "plurality_convergence_report",
]

ENUMERATION_CAP = 3 ** 8
BLOCK = 10 ** 5


class EnumerationError(ValueError):
    """State space too large to enumerate; use the Monte Carlo estimator."""


@dataclass(frozen=True)
class NoiseKernel:
    k: int
    rho: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if not -1 / (self.k - 1) <= self.rho <= 1:
            raise ValueError(f"rho must lie in [-1/(k-1), 1], got {self.rho}")

    @property
    def stay(self):
        return (1 + (self.k - 1) * self.rho) / self.k

    @property
    def switch(self):
        return (1 - self.rho) / self.k

    def matrix(self):
        return self.rho * np.eye(self.k) + (1 - self.rho) / self.k


def _plurality_from_counts(counts):
    counts = np.asarray(counts)
    top = counts == counts.max(axis=-1, keepdims=True)
    return top / top.sum(axis=-1, keepdims=True)


def _counts(votes, k):
    return (np.asarray(votes)[..., None] == np.arange(k)).sum(axis=-2)


class VotingRule:
    """A map from {0..k-1}^n to the simplex of distributions over k outcomes.

    Use the constructors :meth:`plurality`, :meth:`majority`,
    :meth:`dictator`, :meth:`constant` and :meth:`lookup`.
    """

    def __init__(self, kind, k, n, fn: Optional[Callable] = None, table=None, symmetric=False):
        if k < 2 or n < 1:
            raise ValueError("need k >= 2 and n >= 1")
        self.kind, self.k, self.n = kind, int(k), int(n)
        self._fn = fn
        self.table = None if table is None else np.asarray(table, dtype=float)
        self.symmetric = symmetric
        if self.table is not None:
            if self.table.shape != (self.k ** self.n, self.k):
                raise ValueError(f"table must have shape ({self.k ** self.n}, {self.k})")
            if np.any(self.table < 0) or np.any(np.abs(self.table.sum(1) - 1) > 1e-12):
                raise ValueError("table rows must be probability vectors")

    @classmethod
    def plurality(cls, k, n):
        """Most frequent value wins; ties give the uniform mix of the tied values."""
        return cls("plurality", k, n, fn=lambda v: _plurality_from_counts(_counts(v, k)), symmetric=True)

    @classmethod
    def majority(cls, n):
        return cls("majority", 2, n, fn=lambda v: _plurality_from_counts(_counts(v, 2)), symmetric=True)

    @classmethod
    def dictator(cls, k, n, coordinate=0):
        eye = np.eye(k)
        return cls("dictator", k, n, fn=lambda v: eye[np.asarray(v)[..., coordinate]])

    @classmethod
    def constant(cls, k, n, value=0):
        e = np.eye(k)[value]
        return cls("constant", k, n, fn=lambda v: np.broadcast_to(e, np.shape(v)[:-1] + (k,)).copy())

    @classmethod
    def lookup(cls, k, n, table):
        return cls("lookup", k, n, table=table)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls.lookup(int(d["k"]), int(d["n"]), d["table"])

    def to_json(self):
        return json.dumps({"k": self.k, "n": self.n, "table": self.full_table().tolist()})

    def __call__(self, votes):
        votes = np.asarray(votes)
        if votes.shape[-1] != self.n:
            raise ValueError(f"expected {self.n} votes per profile")
        if np.any(votes < 0) or np.any(votes >= self.k):
            raise ValueError("votes out of range")
        if self.table is not None:
            idx = votes @ (self.k ** np.arange(self.n - 1, -1, -1))
            return self.table[idx]
        return self._fn(votes)

    def all_profiles(self):
        grid = np.indices((self.k,) * self.n).reshape(self.n, -1).T
        return grid

    def full_table(self, cap=ENUMERATION_CAP):
        if self.k ** self.n > cap:
            raise EnumerationError(f"k^n = {self.k ** self.n} exceeds {cap}; use noise_stability_mc")
        if self.table is not None:
            return self.table
        return np.asarray(self(self.all_profiles()), dtype=float)

    def from_counts(self, counts):
        """Output for count vectors; only for symmetric rules."""
        if not self.symmetric:
            raise ValueError("rule is not symmetric")
        return _plurality_from_counts(counts)

    def __repr__(self):
        return f"VotingRule({self.kind!r}, k={self.k}, n={self.n})"


def _apply_kernel(T, P, n):
    # T has shape (k,)*n + (m,); apply P along each of the first n axes
    for axis in range(n):
        T = np.moveaxis(np.tensordot(P, T, axes=([1], [axis])), 0, axis)
    return T


def noise_stability_exact(rule: VotingRule, kernel: NoiseKernel, cap=ENUMERATION_CAP) -> float:
    """Exact S_rho f = sum_j E f_j(w) f_j(d) by full enumeration."""
    if kernel.k != rule.k:
        raise ValueError("kernel and rule alphabet sizes differ")
    F = rule.full_table(cap)
    T = F.reshape((rule.k,) * rule.n + (rule.k,))
    PT = _apply_kernel(T, kernel.matrix(), rule.n)
    return float(np.sum(T * PT) / rule.k ** rule.n)


def _block_rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _correlated_votes(rng, kernel, size, n):
    w = rng.integers(0, kernel.k, size=(size, n))
    move = rng.random((size, n)) >= kernel.stay
    shift = rng.integers(1, kernel.k, size=(size, n))
    return w, np.where(move, (w + shift) % kernel.k, w)


def noise_stability_mc(rule: VotingRule, kernel: NoiseKernel, samples=10 ** 6, seed=0, counts=None):
    """Monte Carlo estimate and standard error of S_rho f.

    Samples are drawn in fixed blocks, each with its own Philox stream keyed
    by ``(seed, block)``, so the result depends only on ``seed`` and
    ``samples``. Symmetric rules sample the k x k table of (w_i, d_i) pair
    counts from a multinomial instead of individual votes; pass
    ``counts=False`` to force per-vote sampling.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if kernel.k != rule.k:
        raise ValueError("kernel and rule alphabet sizes differ")
    use_counts = rule.symmetric if counts is None else counts
    k = rule.k
    pair = (kernel.matrix() / k).ravel()
    total = total_sq = 0.0
    done = block = 0
    while done < samples:
        m = min(BLOCK, samples - done)
        rng = _block_rng(seed, block)
        if use_counts:
            c = rng.multinomial(rule.n, pair, size=m).reshape(m, k, k)
            fa, fb = rule.from_counts(c.sum(2)), rule.from_counts(c.sum(1))
        else:
            w, d = _correlated_votes(rng, kernel, m, rule.n)
            fa, fb = rule(w), rule(d)
        y = np.sum(fa * fb, axis=1)
        total += float(y.sum())
        total_sq += float(np.dot(y, y))
        done += m
        block += 1
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / (samples - 1))


def majority_pm(x):
    """Majority of +-1 votes (n odd)."""
    return np.where(np.sum(x, axis=-1) > 0, 1, -1)


def majority_stability_exact(n, rho):
    """E Maj(X) Maj(Y) for odd n from the binomial law of the vote counts.

    With ``A`` plus-votes in X, Y keeps ``A - F1 + F2`` plus-votes where
    ``F1 ~ Bin(A, p)``, ``F2 ~ Bin(n - A, p)`` and ``p = (1 - rho)/2``.
    """
    from scipy.stats import binom
    if n % 2 == 0:
        raise ValueError("n must be odd")
    p = (1 - rho) / 2
    j = np.arange(n + 1)
    total = 0.0
    for A in range(n + 1):
        lose = binom.pmf(j[:A + 1], A, p)
        gain = binom.pmf(j[:n - A + 1], n - A, p)
        plus = A - j[:A + 1, None] + j[None, :n - A + 1]
        w = lose[:, None] * gain[None, :]
        sx = 1 if 2 * A > n else -1
        total += binom.pmf(A, n, 0.5) * sx * float(np.sum(w * np.where(2 * plus > n, 1, -1)))
    return total


def boolean_noise_stability(f, n, rho, mode="exact", samples=10 ** 6, seed=0, cap=2 ** 16):
    """E f(X) f(Y) for +-1 valued ``f`` under rho-correlated uniform +-1 vectors.

    ``f`` takes an array of shape (..., n) with entries +-1. ``mode="mc"``
    returns ``(estimate, standard_error)``.
    """
    if not -1 <= rho <= 1:
        raise ValueError("rho must lie in [-1, 1]")
    kernel = NoiseKernel(2, rho)
    if mode == "exact":
        if 2 ** n > cap:
            raise EnumerationError(f"2^n = {2 ** n} exceeds {cap}")
        x = 1 - 2 * np.indices((2,) * n).reshape(n, -1).T
        v = np.asarray(f(x), dtype=float)
        T = v.reshape((2,) * n + (1,))
        return float(np.sum(T * _apply_kernel(T, kernel.matrix(), n)) / 2 ** n)
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    total = total_sq = 0.0
    done = block = 0
    while done < samples:
        m = min(BLOCK, samples - done)
        w, d = _correlated_votes(_block_rng(seed, block), kernel, m, n)
        y = np.asarray(f(1 - 2 * w), float) * np.asarray(f(1 - 2 * d), float)
        total += float(y.sum())
        total_sq += float(np.dot(y, y))
        done += m
        block += 1
    mean = total / samples
    return mean, math.sqrt(max(total_sq / samples - mean * mean, 0.0) / (samples - 1))


def influence(rule: VotingRule, i, output=None, cap=ENUMERATION_CAP) -> float:
    """Inf_i = E (g - E_i g)^2, summed over output coordinates unless ``output`` is given."""
    if not 0 <= i < rule.n:
        raise ValueError("coordinate out of range")
    T = rule.full_table(cap).reshape((rule.k,) * rule.n + (rule.k,))
    dev = T - T.mean(axis=i, keepdims=True)
    sq = np.mean(dev ** 2, axis=tuple(range(rule.n)))
    return float(sq.sum() if output is None else sq[output])


def plurality_convergence_report(rho, ns=(1, 3, 5, 7), samples=10 ** 6, seed=0):
    """Gap between S_rho(PLUR_{3,n}) and its Gaussian limit for each n.

    Exact enumeration where 3^n is within the cap, Monte Carlo otherwise.
    """
    limit = plurality_limit(rho)
    kernel = NoiseKernel(3, rho)
    rows = []
    for n in ns:
        if n % 2 == 0:
            raise ValueError("n must be odd")
        rule = VotingRule.plurality(3, n)
        if 3 ** n <= ENUMERATION_CAP:
            value, se, method = noise_stability_exact(rule, kernel), 0.0, "exact"
        else:
            value, se = noise_stability_mc(rule, kernel, samples, seed)
            method = "mc"
        rows.append({"n": n, "value": value, "se": se, "limit": limit,
                     "gap": value - limit, "method": method})
    return rows
