import math

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from bergman_kit.errors import DomainError, NonConvergent
from bergman_kit.specialfn import (HypergeometricSpec, beta_fn, hyp, log_beta, pfq, pochhammer,
                                   polyval, series_coefficients)
from bergman_kit.kernel import Params, g_eval


@pytest.mark.parametrize("a,n,expected", [(3.7, 0, 1.0), (1, 4, 24.0), (-1, 2, 0.0), (0.5, 3, 1.875)])
def test_pochhammer_examples(a, n, expected):
    assert pochhammer(a, n) == pytest.approx(expected, abs=1e-15)


# scipy's gamma-ratio route underflows for subnormal a
@given(st.floats(-5, 20).filter(lambda a: a == 0 or abs(a) > 1e-200), st.integers(0, 30))
def test_pochhammer_matches_scipy(a, n):
    ref = sc.poch(a, n)
    assert pochhammer(a, n) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("a,b,expected", [(1, 1, 1.0), (1, 2, 0.5), (2, 3, 1 / 12)])
def test_beta_examples(a, b, expected):
    assert beta_fn(a, b) == pytest.approx(expected, rel=1e-15)


@given(st.floats(0.01, 50), st.floats(0.01, 50))
def test_log_beta_matches_scipy(a, b):
    assert log_beta(a, b) == pytest.approx(sc.betaln(a, b), rel=1e-12, abs=1e-12)


def test_beta_rejects_nonpositive():
    with pytest.raises(DomainError):
        beta_fn(0.0, 1.0)


def test_geometric_and_binomial():
    assert hyp([1, 3.3], [3.3], 0.5) == pytest.approx(2.0, rel=1e-14)
    assert hyp([2], [], 0.25) == pytest.approx(16 / 9, rel=1e-14)


@given(st.floats(-0.9, 3), st.floats(-0.95, 0), st.floats(0, 0.9))
def test_2f1_against_scipy(alpha, beta, x):
    a, b, c = 1.0, alpha + beta + 2, beta + 1
    assert hyp([a, b], [c], x) == pytest.approx(sc.hyp2f1(a, b, c, x), rel=1e-11)


def test_2f1_equals_kernel_route():
    val = hyp([1, 2.5], [0.5], 0.3)
    ref = g_eval(Params(1, -0.5), 0.3) / 0.7 ** 3
    assert val == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0, 1.3, 2.7])
@pytest.mark.parametrize("beta", [-0.9, -0.5, 0])
def test_two_route_grid(alpha, beta):
    t = np.round(np.arange(10) * 0.1, 12)
    lhs = np.array([hyp([1, alpha + beta + 2], [beta + 1], x) for x in t]) * (1 - t) ** (alpha + 2)
    np.testing.assert_allclose(lhs, g_eval(Params(alpha, beta), t), rtol=1e-10)


def test_4f3_against_mpmath():
    args = ([1, 2.5, 2.5, 1.0], [0.5, 0.5, 7.0], 0.64)
    ref = float(mpmath.hyper(*args))
    assert hyp(*args, tol=1e-16) == pytest.approx(ref, rel=1e-12)


def test_complex_argument():
    z = 0.3 + 0.4j
    ref = complex(mpmath.hyp2f1(1, 2.2, 1.5, z))
    assert hyp([1, 2.2], [1.5], z) == pytest.approx(ref, rel=1e-12)


def test_terminating_series():
    # (1 - x)^3 as 1F0(-3;;x)
    assert hyp([-3], [], 0.7) == pytest.approx(0.3 ** 3, rel=1e-13)


def test_errors():
    with pytest.raises(DomainError):
        HypergeometricSpec((1,), (-2.0,), 0.1)
    with pytest.raises(DomainError):
        hyp([1], [2], 1.5)
    with pytest.raises(NonConvergent):
        hyp([1, 1, 1], [1], 0.5)
    with pytest.raises(NonConvergent):
        hyp([1, 2], [2.5], 1.0)
    with pytest.raises(NonConvergent):
        pfq(HypergeometricSpec((1, 1), (1.5,), 0.999, max_terms=10))


def test_unit_circle_balanced():
    # Gauss sum 2F1(a,b;c;1) = G(c)G(c-a-b)/(G(c-a)G(c-b))
    a, b, c = 0.5, 0.25, 5.0
    ref = math.gamma(c) * math.gamma(c - a - b) / (math.gamma(c - a) * math.gamma(c - b))
    assert hyp([a, b], [c], 1.0, tol=1e-13) == pytest.approx(ref, rel=1e-9)


@given(st.floats(0, 0.95))
def test_series_coefficients_geometric(x):
    c = series_coefficients(1.0, lambda n: np.full(n.shape, 1.0), x)
    assert polyval(c, x) == pytest.approx(1 / (1 - x), rel=1e-14)


def test_series_coefficients_rejects_boundary():
    with pytest.raises(NonConvergent):
        series_coefficients(1.0, lambda n: np.ones(n.shape), 1.0)
