import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nsl.gaussian_stability import (
    GridError,
    MIN_CELLS,
    RadialPartitionProfile,
    ResolutionError,
    StabilityValue,
    bilinear_profile_stability,
    cone_partition_stability,
    eight1_report,
    mehler_hermite_expansion,
    mehler_kernel,
    ou_apply,
    penalty_functional,
    profile_stability,
    profile_stability_mc,
    random_balanced_profile,
    tphi_lower_bound,
    two10_report,
)
from nsl.special_functions import gaussian_tail

TWO_PI = 2 * math.pi


def gamma2(x):
    x = np.asarray(x, float)
    return math.exp(-0.5 * float(x @ x)) / TWO_PI


def test_stability_value():
    with pytest.raises(ValueError):
        StabilityValue(1.0, -1e-3)


def test_mehler_basic():
    x, y = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    assert mehler_kernel(0.0, x, y) == pytest.approx(gamma2(x) * gamma2(y), rel=1e-15)
    assert mehler_kernel(0.3, x, y) == mehler_kernel(0.3, y, x)
    with pytest.raises(ValueError):
        mehler_kernel(1.0, x, y)


def test_mehler_marginal():
    x = np.array([0.4, -1.1])
    val = integrate.dblquad(lambda b, a: mehler_kernel(0.6, x, np.array([a, b])), -12, 12, -12, 12,
                            epsabs=1e-13)[0]
    assert val == pytest.approx(gamma2(x), abs=1e-10)


def test_mehler_hermite():
    x, y = np.array([0.5, 0.0]), np.array([0.2, 0.1])
    assert mehler_hermite_expansion(0.2, x, y, 20) == pytest.approx(mehler_kernel(0.2, x, y), abs=1e-8)


def test_ou_apply():
    assert ou_apply(0.7, lambda a, b: np.ones_like(a * b), np.array([3.0, -1.0])) == pytest.approx(1.0, abs=1e-12)
    f = lambda a, b: np.exp(-(a * a + b * b) / 4)
    assert ou_apply(0.0, f, np.array([0.0, 0.0])) == pytest.approx(ou_apply(0.0, f, np.array([2.0, 1.0])), abs=1e-14)
    half = ou_apply(0.5, lambda a, b: float(a > 0), np.array([1.0, 0.0]), method="adaptive")
    assert half == pytest.approx(gaussian_tail(-0.5 / math.sqrt(0.75)), abs=1e-9)
    # smooth Gaussian bump: exact E exp(-|Y|^2/4) with Y ~ N(rho x, (1-rho^2) I)
    rho, x = 0.6, np.array([1.0, 0.5])
    s2 = 1 - rho * rho
    exact = math.exp(-rho * rho * float(x @ x) / (4 + 2 * s2)) * 2 / (2 + s2)
    assert ou_apply(rho, f, x) == pytest.approx(exact, rel=1e-12)


def test_cone():
    assert cone_partition_stability(0.0).value == 1 / 3
    # 1 - S ~ (3 sqrt2 / 2pi) sqrt(1 - rho) near rho = 1
    for eps in (1e-6, 1e-9, 1e-12):
        gap = 1 - cone_partition_stability(1 - eps).value
        assert gap / math.sqrt(eps) == pytest.approx(3 * math.sqrt(2) / (2 * math.pi), rel=1e-3)
    endpoint = 3 * (1 / 9 + (math.acos(0.5) ** 2 - math.acos(-0.25) ** 2) / (4 * math.pi ** 2))
    assert cone_partition_stability(-0.5).value == pytest.approx(endpoint, rel=1e-15)
    assert cone_partition_stability(0.3).uncertainty == 0.0


@pytest.mark.parametrize("rho", [0.05, 0.1, 0.5])
def test_sector_profile_matches_cone(rho):
    v = profile_stability(rho, RadialPartitionProfile.sectors())
    assert abs(v.value - cone_partition_stability(rho).value) <= v.uncertainty + 1e-13
    assert v.uncertainty < 1e-10


def test_profile_zero_rho():
    prof = random_balanced_profile(np.random.default_rng(4), amplitude=0.8)
    v = profile_stability(0.0, prof)
    assert v.value == pytest.approx(float(np.sum(prof.measures() ** 2)), abs=1e-12)


def test_single_set_profile():
    prof = RadialPartitionProfile.constant(theta=(TWO_PI, 0.0, 0.0))
    for rho in (-0.4, 0.3, 0.9):
        assert profile_stability(rho, prof).value == pytest.approx(1.0, abs=1e-10)


def test_profile_resolution_and_json():
    with pytest.raises(ResolutionError):
        RadialPartitionProfile.sectors(M=MIN_CELLS - 1)
    prof = random_balanced_profile(np.random.default_rng(1))
    again = RadialPartitionProfile.from_json(prof.to_json())
    assert np.array_equal(again.theta, prof.theta) and np.array_equal(again.offset, prof.offset)
    with pytest.raises(ValueError):
        RadialPartitionProfile.from_json(json.dumps({"radii": [1.0]}))
    with pytest.raises(json.JSONDecodeError):
        RadialPartitionProfile.from_json("{")


def test_bilinear():
    rng = np.random.default_rng(7)
    A = random_balanced_profile(rng)
    assert bilinear_profile_stability(0.2, A, A).value == pytest.approx(profile_stability(0.2, A).value, abs=1e-14)
    other = RadialPartitionProfile.sectors(M=32)
    with pytest.raises(GridError):
        bilinear_profile_stability(0.2, A, other)
    S = RadialPartitionProfile.sectors()
    for rho in (0.02, 0.023, 0.4):
        v = bilinear_profile_stability(rho, S, S.antipodal())
        assert abs(v.value - cone_partition_stability(-rho).value) <= v.uncertainty + 1e-13
    B = random_balanced_profile(rng)
    tiny = bilinear_profile_stability(1e-9, A, B).value
    assert tiny == pytest.approx(float(A.measures() @ B.measures()), abs=1e-8)


@pytest.mark.slow
def test_antipodal_sectors_monte_carlo():
    S = RadialPartitionProfile.sectors()
    est, se = profile_stability_mc(0.02, S, S.antipodal(), samples=10 ** 7, seed=11)
    exact = bilinear_profile_stability(0.02, S, S.antipodal()).value
    assert abs(est - exact) < 3 * se


def test_mc_matches_quadrature_random_profile():
    prof = random_balanced_profile(np.random.default_rng(3))
    est, se = profile_stability_mc(0.3, prof, samples=10 ** 6, seed=5)
    assert abs(est - profile_stability(0.3, prof).value) < 4 * se
    assert profile_stability_mc(0.3, prof, samples=10 ** 5, seed=5) == \
        profile_stability_mc(0.3, prof, samples=10 ** 5, seed=5)


def test_penalty():
    assert penalty_functional(0.1, RadialPartitionProfile.sectors()) == 0.0
    rho = 0.1
    one = RadialPartitionProfile.constant(theta=(TWO_PI, 0.0, 0.0))
    oracle = 1.5 * (2 / 3) * integrate.quad(lambda r: r * -math.expm1(-rho * r / 2) * math.exp(-r * r / 2),
                                            0, np.inf, epsabs=1e-15)[0]
    assert penalty_functional(rho, one) == pytest.approx(oracle, rel=1e-10)
    # scaling the deviation by sqrt 2 doubles the functional
    d = np.array([0.1, -0.04, -0.06])
    p1 = RadialPartitionProfile.constant(theta=TWO_PI * (1 / 3 + d))
    p2 = RadialPartitionProfile.constant(theta=TWO_PI * (1 / 3 + math.sqrt(2) * d))
    assert penalty_functional(rho, p2) == pytest.approx(2 * penalty_functional(rho, p1), rel=1e-12)
    with pytest.raises(ValueError):
        penalty_functional(-0.1, one)


def test_tphi_bound():
    assert tphi_lower_bound(0.1, 1e-12) == pytest.approx(0.0, abs=1e-12)
    rho, r = 0.1, 1.0
    a = rho * r / (1 - rho * rho)
    exact = ou_apply(rho, lambda y1, y2: 1 - np.exp(-a * np.hypot(y1, y2)), np.array([r, 0.0]), nodes=128)
    assert exact > tphi_lower_bound(rho, r)
    # strictly increasing until it rounds to 1 in double precision
    v = tphi_lower_bound(0.1, np.linspace(0, 150, 3001))
    assert np.all(np.diff(v) >= 0)
    assert np.all(np.diff(v[v < 1 - 1e-12]) > 0)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=8, deadline=None)
def test_random_profiles_balanced(seed):
    prof = random_balanced_profile(np.random.default_rng(seed))
    assert np.allclose(prof.measures(), 1 / 3, atol=1e-12)
    assert np.all(prof.theta >= -1e-12)


def test_two10_and_eight1_single_profile():
    prof = random_balanced_profile(np.random.default_rng(2))
    rep = two10_report(0.05, prof)
    assert rep["c"] == 0.3 and rep["margin"] > rep["uncertainty"] and rep["rhs_nonpositive"]
    rep = eight1_report(0.02, prof)
    assert rep["margin"] > rep["uncertainty"]
    with pytest.raises(ValueError):
        eight1_report(-0.02, prof)
