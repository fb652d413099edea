import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nsl.spherical_stability import (
    ArcPartition,
    RegimeError,
    SphericalKernelParams,
    arc_F,
    arc_F_derivative,
    arc_F_quadrature,
    arc_F_uncertainty,
    arc_deficit,
    kernel_g,
    lambda_bounds,
    lambda_envelopes,
    lambda_sequence,
    lambda_values,
    lemma6_ratio,
    lemma10_rhs,
    three1_sides,
)

TWO_PI = 2 * math.pi
I0_1 = math.fsum(0.25 ** m / math.factorial(m) ** 2 for m in range(30))
I1_1 = math.fsum(0.5 * 0.25 ** m / (math.factorial(m) * math.factorial(m + 1)) for m in range(30))
P05 = SphericalKernelParams(0.05)


def test_params_validation():
    with pytest.raises(ValueError):
        SphericalKernelParams(1.0)
    with pytest.raises(ValueError):
        SphericalKernelParams(0.1, r=0)
    with pytest.raises(NotImplementedError):
        SphericalKernelParams(0.1, n=3)
    p = SphericalKernelParams.from_argument(1.0)
    assert p.a == pytest.approx(1.0, rel=1e-15)
    assert SphericalKernelParams.from_argument(-2.0).a == pytest.approx(-2.0, rel=1e-15)


def test_arc_partition():
    ArcPartition((math.pi, math.pi, 0.0))
    with pytest.raises(ValueError):
        ArcPartition((1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        ArcPartition((-0.1, math.pi, math.pi + 0.1))


def test_kernel_g():
    assert kernel_g(SphericalKernelParams(0.0), 0.3) == pytest.approx(1.0, abs=1e-15)
    p = SphericalKernelParams(0.1)
    assert kernel_g(p, 1.0) > 1 > kernel_g(p, -1.0)
    a = p.a
    denom = integrate.quad(lambda t: math.exp(a * math.cos(t)), 0, math.pi, epsabs=1e-15)[0] / math.pi
    assert kernel_g(p, 0.0) == pytest.approx(1 / denom, rel=1e-13)
    th = np.linspace(0, TWO_PI, 2001)[:-1]
    for rho in (0.1, 0.6, 0.95):
        q = SphericalKernelParams(rho, 2.0, 3.0)
        assert np.mean(kernel_g(q, np.cos(th))) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        kernel_g(p, 1.5)


def test_lambda_at_zero():
    seq = lambda_sequence(SphericalKernelParams(0.0), 10)
    assert seq.values[0] == 1.0
    assert np.all(seq.values[1:] == 0.0)


def test_lambda_one():
    p = SphericalKernelParams.from_argument(1.0)
    lam1 = lambda_sequence(p, 5).values[1]
    assert lam1 == pytest.approx(I1_1 / I0_1, rel=1e-13)
    lo, hi = lambda_bounds(p, 1)
    assert lo <= lam1 <= hi


def test_lambda_negative_sign():
    pos = lambda_values(2.0, 6)
    neg = lambda_values(-2.0, 6)
    assert np.allclose(neg, pos * (-1.0) ** np.arange(7), rtol=0, atol=0)
    with pytest.raises(RegimeError):
        lambda_bounds(SphericalKernelParams(-0.2), 1)


def test_bounds_small_a():
    lo, hi = lambda_bounds(SphericalKernelParams.from_argument(1e-9), 1)
    assert 0 < lo <= hi < 1e-8


def test_bracket_relative_width_shrinks():
    widths = []
    for a in (0.1, 1.0, 10.0):
        lo, hi = lambda_bounds(SphericalKernelParams.from_argument(a), 2)
        widths.append((hi - lo) / hi)
    assert widths[0] > widths[1] > widths[2]


def test_tail_bound_covers_tail():
    for a in (0.5, 5.0, 40.0):
        p = SphericalKernelParams.from_argument(a)
        seq = lambda_sequence(p, 30)
        far = lambda_values(a, 400)[31:]
        d = np.arange(31, 401)
        assert np.sum(far / d ** 2) <= seq.tail_bound


@given(st.floats(1e-3, 60.0))
@settings(max_examples=60, deadline=None)
def test_lambda_monotone_and_bracketed(a):
    lam = lambda_values(a, 12)
    assert np.all(np.diff(lam) <= 0) and np.all(lam[1:] > 0)
    low_a, up_a, low_b, up_b = (np.array(v) for v in zip(*[lambda_envelopes(a, d) for d in range(1, 13)]))
    assert np.all(np.maximum(low_a, low_b) <= lam[1:] * (1 + 1e-13))
    assert np.all(lam[1:] <= np.minimum(up_a, up_b) * (1 + 1e-13))


def test_arc_F_endpoints_and_symmetry():
    assert arc_F(P05, 0.0) == 0.0
    assert arc_F(P05, TWO_PI) == pytest.approx(0.0, abs=1e-16)
    assert arc_F(P05, 1.0) == pytest.approx(arc_F(P05, TWO_PI - 1.0), abs=1e-15)
    th = np.linspace(0, TWO_PI, 25)
    for a in (0.1, 3.0, -2.0):
        assert np.allclose(arc_F(a, th), arc_F(a, TWO_PI - th), atol=1e-10, rtol=0)
    with pytest.raises(ValueError):
        arc_F(P05, 7.0)


def test_arc_F_quadrature_points():
    assert arc_F_quadrature(P05, 0.0) == 0.0
    for p, th in ((SphericalKernelParams(0.01), math.pi), (SphericalKernelParams(0.1), TWO_PI / 3),
                  (SphericalKernelParams(-0.3, 1.5, 2.0), 2.5)):
        assert arc_F(p, th) == pytest.approx(arc_F_quadrature(p, th), abs=1e-8)
    assert arc_F_quadrature(SphericalKernelParams(0.1), TWO_PI / 3) > 0


def test_arc_F_derivative():
    assert arc_F_derivative(P05, 0.0) == 0.0
    assert arc_F_derivative(P05, math.pi) == pytest.approx(0.0, abs=1e-15)
    h = 1e-5
    for p in (P05, SphericalKernelParams(0.5, 2, 2)):
        for th in (TWO_PI / 3, 1.0, 4.0):
            fd = (arc_F(p, th + h) - arc_F(p, th - h)) / (2 * h)
            assert arc_F_derivative(p, th) == pytest.approx(fd, abs=max(1e-7, 10 * arc_F_uncertainty(p)))


def test_lemma5_derivative_sign():
    # F'(t1) - F'(t2) < 0 when t1 > t2 and pi <= t1 + t2 <= 2 pi
    for p in (SphericalKernelParams(0.05), SphericalKernelParams(0.5, 2, 2), SphericalKernelParams(0.9, 3, 3)):
        for t1 in np.linspace(0.6, TWO_PI - 0.1, 14):
            for t2 in np.linspace(0.05, t1 - 0.05, 8):
                if math.pi <= t1 + t2 <= TWO_PI:
                    assert arc_F_derivative(p, t1) - arc_F_derivative(p, t2) < 0


def test_lemma6_ratio():
    for p in (SphericalKernelParams(0.05), SphericalKernelParams(0.7, 2, 2)):
        for t in np.linspace(0.05, math.pi / 2 - 0.05, 12):
            assert lemma6_ratio(p, t) < 2 * t / math.pi


def test_arc_deficit_examples():
    assert arc_deficit(P05, ArcPartition.equal()) == pytest.approx(0.0, abs=1e-16)
    assert arc_deficit(P05, (math.pi, math.pi, 0.0)) < 0
    th = np.array([1.5 * math.pi, math.pi / 4, math.pi / 4])
    assert arc_deficit(P05, tuple(th)) <= float(lemma10_rhs(P05.a, th))


def test_three1():
    for a in np.geomspace(1e-3, 50, 40):
        left, right, tail = three1_sides(a)
        assert left - right > tail
