import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nsl.discrete_social_choice import (
    EnumerationError,
    NoiseKernel,
    VotingRule,
    boolean_noise_stability,
    influence,
    majority_pm,
    majority_stability_exact,
    noise_stability_exact,
    noise_stability_mc,
    plurality_convergence_report,
)
from nsl.hardness_constants import plurality_limit


def test_kernel():
    k = NoiseKernel(3, 0.1)
    assert k.stay + 2 * k.switch == pytest.approx(1.0, abs=1e-16)
    assert np.allclose(k.matrix().sum(1), 1)
    NoiseKernel(3, -0.5)
    with pytest.raises(ValueError):
        NoiseKernel(3, -0.6)
    with pytest.raises(ValueError):
        NoiseKernel(1, 0.0)


@given(st.integers(2, 6), st.floats(0, 1))
@settings(max_examples=50, deadline=None)
def test_kernel_probabilities(k, t):
    rho = -1 / (k - 1) + t * (1 + 1 / (k - 1))
    K = NoiseKernel(k, min(rho, 1.0))
    P = K.matrix()
    assert np.all(P >= -1e-15) and np.allclose(P.sum(1), 1, atol=1e-14)


def test_plurality_ties():
    rule = VotingRule.plurality(3, 4)
    out = rule(np.array([[0, 0, 1, 1], [2, 2, 2, 0], [0, 1, 2, 2]]))
    assert np.allclose(out, [[0.5, 0.5, 0], [0, 0, 1], [0, 0, 1]])
    out = VotingRule.plurality(3, 3)(np.array([0, 1, 2]))
    assert np.allclose(out, 1 / 3)
    with pytest.raises(ValueError):
        rule(np.array([0, 1, 3, 0]))


def test_constant_rule():
    rule = VotingRule.constant(3, 4)
    for rho in (-0.4, 0.0, 0.7):
        assert noise_stability_exact(rule, NoiseKernel(3, rho)) == pytest.approx(1.0, abs=1e-14)
    est, se = noise_stability_mc(rule, NoiseKernel(3, 0.2), samples=10 ** 4, seed=1)
    assert est == 1.0 and se == 0.0


@pytest.mark.parametrize("rho", [-0.5, -0.1, 0.0, 0.3, 0.9])
def test_dictator(rho):
    assert noise_stability_exact(VotingRule.dictator(3, 5), NoiseKernel(3, rho)) == \
        pytest.approx((1 + 2 * rho) / 3, abs=1e-14)


def test_zero_rho_means():
    for rule in (VotingRule.plurality(3, 5), VotingRule.dictator(3, 3)):
        F = rule.full_table()
        assert noise_stability_exact(rule, NoiseKernel(3, 0.0)) == pytest.approx(float(np.sum(F.mean(0) ** 2)),
                                                                                   abs=1e-14)
        assert noise_stability_exact(rule, NoiseKernel(3, 0.0)) == pytest.approx(1 / 3, abs=1e-14)


def test_enumeration_cap():
    with pytest.raises(EnumerationError):
        noise_stability_exact(VotingRule.plurality(3, 9), NoiseKernel(3, 0.1))
    noise_stability_exact(VotingRule.plurality(3, 8), NoiseKernel(3, 0.1))


def test_mc_vs_exact_plurality():
    rule, K = VotingRule.plurality(3, 4), NoiseKernel(3, 0.1)
    exact = noise_stability_exact(rule, K)
    est, se = noise_stability_mc(rule, K, samples=10 ** 6, seed=42)
    assert abs(est - exact) < 4 * se
    est2, se2 = noise_stability_mc(rule, K, samples=10 ** 6, seed=42, counts=False)
    assert abs(est2 - exact) < 4 * se2


def test_mc_seed_determinism():
    rule, K = VotingRule.plurality(3, 5), NoiseKernel(3, 0.2)
    assert noise_stability_mc(rule, K, 20000, seed=9) == noise_stability_mc(rule, K, 20000, seed=9)
    assert noise_stability_mc(rule, K, 20000, seed=9) != noise_stability_mc(rule, K, 20000, seed=10)
    with pytest.raises(ValueError):
        noise_stability_mc(rule, K, 10, seed=1)


def test_boolean():
    for rho in (-0.3, 0.4):
        assert boolean_noise_stability(lambda x: x[..., 0], 3, rho) == pytest.approx(rho, abs=1e-15)
    assert boolean_noise_stability(majority_pm, 3, 0.0) == pytest.approx(0.0, abs=1e-15)
    # Maj_3: (3/4) rho + (1/4) rho^3
    assert boolean_noise_stability(majority_pm, 3, 0.5) == pytest.approx(0.75 * 0.5 + 0.25 * 0.125, abs=1e-15)
    for n in (3, 5, 7):
        for rho in (0.2, 0.6):
            assert boolean_noise_stability(lambda x: -majority_pm(x), n, rho) == \
                pytest.approx(boolean_noise_stability(majority_pm, n, rho), abs=1e-15)
    est, se = boolean_noise_stability(majority_pm, 5, 0.3, mode="mc", samples=10 ** 5, seed=3)
    assert abs(est - boolean_noise_stability(majority_pm, 5, 0.3)) < 4 * se


@pytest.mark.parametrize("n", [1, 3, 5, 9, 11])
def test_majority_exact_matches_enumeration(n):
    for rho in (0.1, 0.5, -0.3):
        assert majority_stability_exact(n, rho) == pytest.approx(boolean_noise_stability(majority_pm, n, rho),
                                                                 abs=1e-13)


def test_majority_rule_relation():
    # the simplex-valued rule agrees with +-1 majority through S = (1 + E f f)/2
    for n in (3, 5):
        s = noise_stability_exact(VotingRule.majority(n), NoiseKernel(2, 0.4))
        assert s == pytest.approx((1 + majority_stability_exact(n, 0.4)) / 2, abs=1e-14)


def test_influence():
    assert influence(VotingRule.constant(3, 3), 1) == 0.0
    assert influence(VotingRule.dictator(3, 3), 0, output=0) == pytest.approx(2 / 9, abs=1e-15)
    assert influence(VotingRule.dictator(3, 3), 1) == 0.0
    rule = VotingRule.plurality(3, 5)
    infl = [influence(rule, i) for i in range(5)]
    assert max(infl) - min(infl) < 1e-12
    assert all(0 <= v <= 1 for v in infl)


def test_lookup_json():
    rule = VotingRule.plurality(3, 3)
    again = VotingRule.from_json(rule.to_json())
    assert again.kind == "lookup"
    K = NoiseKernel(3, 0.25)
    assert noise_stability_exact(again, K) == pytest.approx(noise_stability_exact(rule, K), abs=1e-15)
    votes = np.array([[2, 1, 0], [1, 1, 2]])
    assert np.allclose(again(votes), rule(votes))
    bad = json.loads(rule.to_json())
    bad["table"][0] = [0.5, 0.6, 0.0]
    with pytest.raises(ValueError):
        VotingRule.from_json(json.dumps(bad))
    with pytest.raises(ValueError):
        VotingRule.lookup(3, 2, np.ones((8, 3)) / 3)


def test_monotone_in_rho():
    rhos = np.linspace(0, 0.99, 12)
    for rule, k in ((VotingRule.plurality(3, 5), 3), (VotingRule.majority(5), 2)):
        vals = [noise_stability_exact(rule, NoiseKernel(k, r)) for r in rhos]
        assert np.all(np.diff(vals) >= 0)


def test_convergence_report():
    rows = plurality_convergence_report(0.1, (1, 3, 5))
    assert rows[0]["value"] == pytest.approx((1 + 0.2) / 3, abs=1e-15)
    assert rows[1]["gap"] > rows[2]["gap"] > 0
    assert all(r["limit"] == plurality_limit(0.1) for r in rows)
    with pytest.raises(ValueError):
        plurality_convergence_report(0.1, (2,))


@pytest.mark.slow
def test_convergence_large_n():
    (row,) = plurality_convergence_report(0.1, (1001,), samples=10 ** 6, seed=8)
    assert row["method"] == "mc"
    assert abs(row["gap"]) < 0.02
