import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from bergman_kit import berezin as bz
from bergman_kit import diskquad as dq
from bergman_kit import metric as mt
from bergman_kit.errors import BudgetExhausted, DomainError, QuadratureAccuracyWarning
from bergman_kit.kernel import Params

P = Params(1.0, -0.5)


def hyperbolic(alpha, z, w):
    """Distance for ``beta = 0``, where the density is ``sqrt(alpha+2)/(1-|z|^2)``."""
    return math.sqrt(alpha + 2) * math.atanh(abs((z - w) / (1 - np.conj(z) * w)))


def rho_sq_mp(alpha, beta, t):
    """``d/dt (t d/dt log K)`` with mpmath differentiation of the 2F1."""
    f = lambda x: x * mpmath.diff(lambda y: mpmath.log(mpmath.hyp2f1(1, alpha + beta + 2, beta + 1, y)), x)
    with mpmath.workdps(40):
        return float(mpmath.diff(f, t))


@given(st.floats(-0.9, 4), st.floats(-0.9, 0))
def test_rho_at_origin(alpha, beta):
    p = Params(alpha, beta)
    assert mt.rho(p, 0.0) ** 2 == pytest.approx((alpha + beta + 2) / (beta + 1), rel=1e-13)


@given(st.floats(-0.9, 4), st.floats(0, 0.999))
def test_rho_beta_zero(alpha, r):
    assert mt.rho(Params(alpha, 0.0), r) == pytest.approx(math.sqrt(alpha + 2) / (1 - r * r), rel=1e-11)


@pytest.mark.parametrize("alpha,beta", [(1.0, -0.5), (-0.5, -0.9), (3.0, -0.1), (0.0, -0.5)])
def test_rho_against_mpmath(alpha, beta):
    p = Params(alpha, beta)
    t = np.array([0.05, 0.3, 0.7, 0.95])
    ref = [rho_sq_mp(alpha, beta, x) for x in t]
    np.testing.assert_allclose(mt.rho_squared(p, t), ref, rtol=1e-9)
    np.testing.assert_allclose(mt.rho_squared_series(p, t), ref, rtol=1e-9)


@given(st.floats(-0.9, 4), st.floats(-0.9, 0))
def test_rho_positive(alpha, beta):
    vals = mt.rho(Params(alpha, beta), np.linspace(0, 0.999, 50))
    assert np.all(vals > 0)


def test_rho_domain():
    with pytest.raises(DomainError):
        mt.rho(P, 1.0)
    with pytest.raises(DomainError):
        mt.rho(Params(1.0, 0.5), 0.3)


def test_rho_table_close_to_exact():
    table = mt.rho_table(P)
    z = np.array([0.1, 0.5j, -0.9, 0.99 + 0.0j])
    val, grad = table.value_and_grad(z)
    np.testing.assert_allclose(val, mt.rho(P, z), rtol=1e-6)
    h = 1e-6
    fd = (mt.rho(P, z + h) - mt.rho(P, z - h)) / (2 * h)
    # the spline only steers the optimizer; reported lengths use the exact density
    np.testing.assert_allclose(grad.real, fd, rtol=1e-3)


def test_polyline_basics():
    path = mt.PathPolyline.chord(0.0, 0.5j, 4)
    assert path.segments == 4
    assert path.refined().segments == 8
    assert path.reversed().points[0] == 0.5j
    point, vel = path.at(0.5)
    assert point == pytest.approx(0.25j) and vel == pytest.approx(0.5j)
    rows = path.to_rows()
    assert rows[-1] == {"index": 4, "re": 0.0, "im": 0.5}
    with pytest.raises(DomainError):
        mt.PathPolyline([0.0])
    with pytest.raises(DomainError):
        mt.PathPolyline([0.0, 1.0])
    with pytest.raises(DomainError):
        mt.PathPolyline([0.0, 0.0, 0.2])


@pytest.mark.parametrize("r", [0.3, 0.6, 0.9, 0.99])
def test_radial_length_beta_zero(r):
    length = mt.path_length(Params(2.0, 0.0), mt.PathPolyline.chord(0.0, r))
    assert length == pytest.approx(2 * math.atanh(r), rel=1e-12)


def test_path_length_against_quad():
    z, w = 0.2 + 0.1j, -0.5 + 0.6j
    path = mt.PathPolyline.chord(z, w, 3)
    ref, _ = quad(lambda s: mt.rho(P, z + s * (w - z)), 0, 1, epsabs=1e-14, epsrel=1e-13)
    assert mt.path_length(P, path) == pytest.approx(ref * abs(w - z), rel=1e-12)
    assert mt.path_length(P, path.reversed()) == pytest.approx(mt.path_length(P, path), rel=1e-14)


def test_geodesic_trivial():
    r = mt.geodesic_distance(P, 0.3j, 0.3j)
    assert r.distance == 0 and r.converged and r.path is None
    with pytest.raises(DomainError):
        mt.geodesic_distance(P, 0.0, 1.0)


@pytest.mark.parametrize("r", [0.3, 0.6, 0.9])
def test_geodesic_radial_beta_zero(r):
    res = mt.geodesic_distance(Params(1.0, 0.0), 0.0, r)
    assert res.distance == pytest.approx(math.sqrt(3) * math.atanh(r), rel=1e-6)


@pytest.mark.parametrize("z,w", [(0.3 + 0.2j, -0.4 + 0.1j), (0.1j, 0.7 - 0.3j), (-0.8, 0.8j)])
def test_geodesic_matches_hyperbolic(z, w):
    res = mt.geodesic_distance(Params(1.0, 0.0), z, w)
    assert res.distance == pytest.approx(hyperbolic(1.0, z, w), rel=1e-6)
    assert res.distance >= hyperbolic(1.0, z, w) * (1 - 1e-12)


def test_geodesic_symmetry_and_chord_bound():
    z, w = 0.5 + 0.3j, -0.6 + 0.2j
    a = mt.geodesic_distance(P, z, w)
    b = mt.geodesic_distance(P, w, z)
    assert a.distance == pytest.approx(b.distance, rel=1e-6)
    assert a.distance <= mt.path_length(P, mt.PathPolyline.chord(z, w))
    assert list(a.history) == sorted(a.history, reverse=True)


def test_geodesic_budget():
    with pytest.raises(BudgetExhausted) as info:
        mt.geodesic_distance(P, -0.8, 0.8j, budget=3, strict=True)
    res = info.value.result
    assert res is not None and not res.converged
    assert res.distance <= mt.path_length(P, mt.PathPolyline.chord(-0.8, 0.8j))


def test_coherent_states():
    rule = dq.build_rule(P, 60, 256)
    pts, _ = mt._grid(rule)
    for c in (0.0, 0.5j, -0.7 + 0.1j):
        state = mt.CoherentState(c, P)
        assert mt.l2_norm_sq(mt.coherent_state_eval(state, pts), rule) == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(mt.coherent_state_eval(mt.CoherentState(0.0, P), pts), 1.0)
    with pytest.raises(DomainError):
        mt.CoherentState(1.0, P)


def test_projection_of_polynomial():
    rule = dq.build_rule(P, 60, 256)
    state = mt.CoherentState(0.4 - 0.2j, P)
    f = dq.monomial(2, 0)
    z = 0.1 + 0.3j
    # <f, K_xi> = f(xi) for holomorphic polynomials
    xi = 0.4 - 0.2j
    from bergman_kit.kernel import kernel_eval
    norm = float(kernel_eval(P, abs(xi) ** 2))
    ref = kernel_eval(P, z * np.conj(xi)) * xi ** 2 / norm
    assert abs(mt.projection_apply(state, f, z, rule) - ref) < 1e-12


@pytest.mark.parametrize("g", [0.0, 0.3, 0.5j, -0.7 + 0.2j])
@pytest.mark.parametrize("v", [1.0, 0.5j])
def test_projection_identity(g, v):
    chk = mt.projection_norm_identity_check(P, g, v)
    assert chk.lhs == pytest.approx(chk.rhs, rel=1e-6)
    assert chk.a_norm_sq == pytest.approx(chk.a_norm_sq_closed, rel=1e-8)
    assert chk.residual_direct == pytest.approx(chk.lhs, rel=1e-6)


def test_projection_identity_guards():
    with pytest.raises(DomainError):
        mt.projection_norm_identity_check(P, 0.3, 0.0)
    with pytest.warns(QuadratureAccuracyWarning):
        mt.projection_norm_identity_check(P, 0.96, 1.0, dq.build_rule(P, 20, 32))


@pytest.fixture(scope="module")
def ctx():
    return bz.make_context(Params(0.0, -0.5))


def test_lipschitz_examples(ctx):
    rep = mt.lipschitz_check(ctx, None, dq.one(), 0.0, 0.5)
    assert rep.lhs < 1e-12 and rep.margin >= -1e-12
    same = mt.lipschitz_check(ctx, None, dq.monomial(1, 1), 0.2j, 0.2j)
    assert same.lhs == 0 and same.rhs == 0
    rep = mt.lipschitz_check(ctx, Params(0.0, -0.5), dq.monomial(1, 1), 0.0, 0.5)
    assert rep.margin >= 0
    assert rep.certificate >= rep.lhs
    with pytest.raises(DomainError):
        mt.lipschitz_check(ctx, Params(1.0, -0.5), dq.one(), 0.0, 0.5)


def test_derivative_bound(ctx):
    path = mt.PathPolyline.chord(0.0, 0.8, 4)
    samples = mt.derivative_bound_check(ctx, None, dq.monomial(1, 1), path)
    assert len(samples) == 12
    assert all(s.lhs < s.rhs for s in samples)
    assert all(isinstance(s.rhs, float) for s in samples)
    flat = mt.derivative_bound_check(ctx, None, dq.one(), path)
    assert max(s.lhs for s in flat) < 1e-8


def test_derivative_bound_curved_path(ctx):
    geo = mt.geodesic_distance(ctx.params, 0.3j, -0.5, max_segments=16)
    f = dq.harmonic_re(2)
    for s in mt.derivative_bound_check(ctx, None, f, geo.path, per_segment=1):
        assert s.lhs <= s.rhs + 1e-8
