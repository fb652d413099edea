"""Approximation constants for Max-Cut and Max-3-Cut from closed-form stabilities.

Each constant is the infimum over rho of a ratio of a partition's "cut
value" to the value of the corresponding SDP objective. The minimization is a
dense bracketing grid followed by golden-section refinement.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .gaussian_stability import cone_partition_stability

__all__ = [
    "ObjectiveCurve",
    "Minimum",
    "ALPHA2_CURVE",
    "ALPHA3_CURVE",
    "BETA3_CURVE",
    "sector_stability",
    "minimize_curve",
    "alpha2",
    "alpha3",
    "beta3",
    "majority_limit",
    "plurality_limit",
    "all_constants",
]

ONE_MINUS = 1 - 1e-6
GRID_POINTS = 2001


def sector_stability(rho):
    """Closed-form stability of three 120-degree sectors; accepts arrays."""
    rho = np.asarray(rho, dtype=float)
    return 3 * (1 / 9 + (np.arccos(-rho) ** 2 - np.arccos(rho / 2) ** 2) / (4 * math.pi ** 2))


def _alpha2_objective(rho):
    rho = np.minimum(np.asarray(rho, dtype=float), ONE_MINUS)
    return (2 / math.pi) * np.arccos(rho) / (1 - rho)


def _three_objective(rho):
    rho = np.minimum(np.asarray(rho, dtype=float), ONE_MINUS)
    return 1.5 * (1 - sector_stability(rho)) / (1 - rho)


@dataclass(frozen=True)
class ObjectiveCurve:
    name: str
    lo: float
    hi: float
    evaluator: Callable = field(repr=False)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho < self.lo - 1e-15) or np.any(rho > self.hi + 1e-15):
            raise ValueError(f"rho outside [{self.lo}, {self.hi}] for {self.name}")
        out = self.evaluator(rho)
        return float(out) if out.ndim == 0 else out


@dataclass
class Minimum:
    name: str
    value: float
    argmin: float
    at_endpoint: bool
    monotone: bool
    note: str = ""

    def as_dict(self):
        return {"name": self.name, "value": self.value, "argmin": self.argmin,
                "at_endpoint": self.at_endpoint, "monotone": self.monotone, "note": self.note}


ALPHA2_CURVE = ObjectiveCurve("alpha2", -1.0, 1.0, _alpha2_objective)
ALPHA3_CURVE = ObjectiveCurve("alpha3", -0.5, 1.0, _three_objective)
BETA3_CURVE = ObjectiveCurve("beta3", -1 / 43, 0.0, _three_objective)


def minimize_curve(curve: ObjectiveCurve, points=GRID_POINTS, xtol=1e-12) -> Minimum:
    """Grid bracket, then golden section inside the bracketing cell pair.

    If the grid minimum sits at an endpoint the endpoint value is returned
    as is; golden section is only used for interior minima.
    """
    x = np.linspace(curve.lo, curve.hi, points)
    y = curve(x)
    i = int(np.argmin(y))
    d = np.diff(y)
    monotone = bool(np.all(d > 0) or np.all(d < 0))
    if i == 0 or i == points - 1:
        return Minimum(curve.name, float(y[i]), float(x[i]), True, monotone)
    res = minimize_scalar(curve.evaluator, bracket=(x[i - 1], x[i], x[i + 1]), method="golden",
                          tol=xtol)
    xs, ys = float(res.x), float(res.fun)
    if ys > y[i]:
        xs, ys = float(x[i]), float(y[i])
    return Minimum(curve.name, ys, xs, False, monotone)


def alpha2() -> Minimum:
    """inf over rho in [-1, 1] of (2/pi) arccos(rho) / (1 - rho)."""
    return minimize_curve(ALPHA2_CURVE)


def alpha3() -> Minimum:
    """inf over rho in [-1/2, 1] of (3/2)(1 - sector stability)/(1 - rho)."""
    m = minimize_curve(ALPHA3_CURVE)
    m.note = "conditional on the sector partition being optimal"
    return m


def beta3() -> Minimum:
    """Same objective as :func:`alpha3` restricted to [-1/43, 0]."""
    m = minimize_curve(BETA3_CURVE)
    m.note = "conditional on the sector partition being optimal"
    return m


def majority_limit(rho):
    """Limiting noise stability of majority, 1 - (2/pi) arccos(rho)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) >= 1):
        raise ValueError("rho must lie in (-1, 1)")
    out = 1 - (2 / math.pi) * np.arccos(rho)
    return float(out) if out.ndim == 0 else out


def plurality_limit(rho) -> float:
    """Limiting noise stability of three-candidate plurality."""
    if not -0.5 <= rho < 1:
        raise ValueError("rho must lie in [-1/2, 1)")
    return cone_partition_stability(rho).value


def all_constants():
    return [alpha2(), alpha3(), beta3()]
