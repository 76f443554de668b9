import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trudinger.constants import lambda_threshold, zeta_barenblatt, zeta_davies_gaffney
from trudinger.errors import ConfigError, DomainError, InsufficientData, PreconditionError, UnsupportedOperation
from trudinger.exact import ExactSolution, lambda_integral, sample_trace
from trudinger.fields import RadialGrid, Trace
from trudinger.geometry import ModelManifold, Region, Shell
from trudinger.verify import (
    CallableWeight,
    CheckResult,
    RegularFunctionSpec,
    WeightFunction,
    audit_weight,
    check_davies_gaffney,
    check_integral_max_principle,
    check_lambda_decay,
    check_mean_value_scaleinv,
    check_norm_monotonicity,
    check_subgaussian_envelope,
    corollary_rho,
    davies_gaffney_rhs,
    lambda_norm,
    mean_value_band,
    neighborhood_decay_stability,
    sharpness_fit,
    sup_over_ball,
    weighted_lp,
)


@pytest.fixture(scope="module")
def heat_trace():
    sol = ExactSolution.barenblatt(2.0, 1)
    grid = RadialGrid(sol.manifold(), 20.0, 800)
    return sol, sample_trace(sol, grid, np.linspace(1.0, 5.0, 17))


def test_check_result():
    c = CheckResult("x", 1.0, 1.0, 1.0, 1e-6, {"b": 2, "a": 0.5})
    assert c.passed and c.margin == 0.0
    assert c.context_str() == "a=0.5;b=2"
    assert not CheckResult("x", 1.0, 1.1, 1.0, 1e-6).passed
    assert CheckResult("x", 1.0, 1.0 + 1e-7, 1.0, 1e-6).passed


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("lam_extra", [0.0, 2.0])
def test_lemma_weight_passes_audit(p, lam_extra):
    lam = lambda_threshold(p) + lam_extra
    xi = WeightFunction.davies_gaffney(p, lam, Region(1.0, 0.5), s=3.0)
    r = np.linspace(0.0, 4.0, 101)
    worst = audit_weight(xi, r, [0.0, 1.0, 2.5], p, lam)
    assert worst <= 1e-10
    # zero on A_r^c, strictly negative inside
    v = xi(r, 1.0)
    assert np.all(v[r >= 1.5] == 0) and np.all(v[r < 1.5] < 0)


def test_audit_rejects_bad_weights():
    p, lam = 2.0, 2.0
    A = Region(1.0, 0.5)
    too_steep = WeightFunction(2.0 * zeta_davies_gaffney(p, lam), A, 3.0, p)
    r = np.linspace(0.0, 4.0, 41)
    with pytest.raises(ConfigError):
        audit_weight(too_steep, r, [0.0], p, lam)
    positive = CallableWeight(lambda rr, tt: 0.1 + 0 * rr)
    with pytest.raises(ConfigError):
        audit_weight(positive, r, [0.0], p, lam)
    with pytest.raises(DomainError):
        WeightFunction.davies_gaffney(p, lam, A, 1.0)(r, 1.0)


def test_weighted_lp_trace_vs_exact(heat_trace):
    sol, tr = heat_trace
    for lam in (1.0, 2.0, 3.0):
        exact = lambda_integral(sol, lam, 2.0)
        assert weighted_lp(sol, lam, t=2.0) == pytest.approx(exact, rel=1e-10)
        assert weighted_lp(tr, lam, t=2.0) == pytest.approx(exact, rel=1e-4)
    shell = Shell(1.0, 3.0)
    assert weighted_lp(tr, 2.0, shell, t=2.0) == pytest.approx(weighted_lp(sol, 2.0, shell, t=2.0), rel=1e-4)
    assert lambda_norm(tr, math.inf, t=2.0) == pytest.approx(sol(0.0, 2.0), rel=1e-4)
    with pytest.raises(DomainError):
        weighted_lp(tr, 0.0)
    with pytest.raises(DomainError):
        weighted_lp(sol, 1.0)


@settings(max_examples=40, deadline=None)
@given(lo=st.floats(0.0, 5.0), w1=st.floats(0.01, 5.0), w2=st.floats(0.01, 5.0), lam=st.floats(1.0, 4.0))
def test_weighted_lp_is_additive(heat_trace, lo, w1, w2, lam):
    _, tr = heat_trace
    a = weighted_lp(tr, lam, Shell(lo, lo + w1), t=1.0)
    b = weighted_lp(tr, lam, Shell(lo + w1, lo + w1 + w2), t=1.0)
    c = weighted_lp(tr, lam, Shell(lo, lo + w1 + w2), t=1.0)
    assert a + b == pytest.approx(c, rel=1e-10, abs=1e-300)


def test_monotone_on_exact(heat_trace):
    _, tr = heat_trace
    res = check_norm_monotonicity(tr, [1.0, 2.0, math.inf])
    assert res and all(c.passed for c in res)


def test_monotone_detects_growth(heat_trace):
    _, tr = heat_trace
    grown = Trace(tr.grid, tr.times, tr.values * np.linspace(1.0, 2.0, len(tr))[:, None], tr.p)
    assert not all(c.passed for c in check_norm_monotonicity(grown, [2.0]))


def test_integral_max_principle_exact(heat_trace):
    _, tr = heat_trace
    xi = WeightFunction.davies_gaffney(2.0, 2.0, Region(1.0, 2.0), s=6.0)
    res = check_integral_max_principle(tr, 2.0, xi)
    assert len(res) == len(tr) - 1
    assert all(c.passed for c in res)
    with pytest.raises(PreconditionError):
        check_integral_max_principle(tr, 1.5, xi)


def test_davies_gaffney_rhs_limits(heat_trace):
    _, tr = heat_trace
    A = Region(1.0)
    total = weighted_lp(tr, 2.0, t=tr.t_initial)
    assert davies_gaffney_rhs(tr, 2.0, A, 0.0, 1.0) == pytest.approx(total, rel=1e-12)
    rs = np.linspace(0.0, 10.0, 21)
    rhs = davies_gaffney_rhs(tr, 2.0, A, rs, 1.0)
    assert np.all(np.diff(rhs) <= 0)


def test_davies_gaffney_exact(heat_trace):
    _, tr = heat_trace
    for ratio in (1.0, 2.0, 4.0):
        res = check_davies_gaffney(tr, 2.0, Region(1.0), ratio=ratio)
        assert all(c.passed for c in res)
    with pytest.raises(DomainError):
        check_davies_gaffney(tr, 2.0, Region(1.0))


def test_regular_function():
    g = RegularFunctionSpec(0.5, theta=2.0)
    assert g.Theta == pytest.approx(math.sqrt(2))
    assert g.certify()
    assert not RegularFunctionSpec(-1.0).certify()
    assert g.with_constant(3.0)(4.0) == pytest.approx(2.0 / 3.0)
    with pytest.raises(PreconditionError):
        RegularFunctionSpec(1.0, theta=1.0)


def test_corollary_rho():
    assert corollary_rho(0.0, 1.0) == 1.0
    assert corollary_rho(10.0, 1.0) == 5.0
    with pytest.raises(PreconditionError):
        corollary_rho(1.0, 1.0)
    with pytest.raises(PreconditionError):
        corollary_rho(2.5, 1.0, c=0.9)
    with pytest.raises(DomainError):
        corollary_rho(-1.0, 1.0)


@pytest.mark.parametrize("p, n, lam", [(2.0, 1, 2.0), (2.0, 3, 2.0), (3.0, 1, 3.0), (1.5, 2, 3.0)])
def test_lambda_decay_exact(p, n, lam):
    sol = ExactSolution.barenblatt(p, n)
    slope, res = check_lambda_decay(sol, lam, n, p, times=np.geomspace(1, 100, 21))
    assert slope == pytest.approx(-(lam - 1) * n / p, rel=1e-8)
    assert res.passed


def test_lambda_decay_preconditions(heat_trace):
    sol, tr = heat_trace
    with pytest.raises(InsufficientData):
        check_lambda_decay(sol, 2.0, 1, 2.0)
    with pytest.raises(InsufficientData):
        check_lambda_decay(sol, 2.0, 1, 2.0, times=[1.0, 2.0, 10.0])
    poly = ExactSolution.polynomial_model(2.0, 1.5, 2)
    grid = RadialGrid(poly.manifold(), 10.0, 64)
    ptr = sample_trace(poly, grid, np.linspace(1, 10, 20))
    with pytest.raises(UnsupportedOperation):
        check_lambda_decay(ptr, 2.0, 2, 2.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_sharpness_exact(p):
    sol = ExactSolution.barenblatt(p, 1)
    grid = RadialGrid(sol.manifold(), 15.0, 400)
    tr = sample_trace(sol, grid, [1.0, 2.0])
    slope, intercept, res = sharpness_fit(tr, p, 1)
    assert abs(slope - zeta_barenblatt(p)) <= 1e-10 * zeta_barenblatt(p)
    assert abs(intercept) < 1e-9
    assert res.passed


def test_sup_over_ball(heat_trace):
    sol, tr = heat_trace
    assert sup_over_ball(sol, 3.0, 1.0, 2.0) == sol(2.0, 2.0)
    # the trace maximum sits at the innermost cell centre inside [2, 4]
    r_in = tr.grid.centers[tr.grid.centers >= 2.0][0]
    assert sup_over_ball(tr, 3.0, 1.0, 2.0) == sol(r_in, 2.0)
    with pytest.raises(DomainError):
        sup_over_ball(tr, 100.0, 1.0, 2.0)


def test_envelope_exact_pair():
    sol = ExactSolution.barenblatt(2.0, 1)
    A = Region(1.0)
    good = check_subgaussian_envelope(sol, 2.0, 1, A, zeta_barenblatt(2.0) / 2)
    bad = check_subgaussian_envelope(sol, 2.0, 1, A, 2 * zeta_barenblatt(2.0))
    assert good.stable and good.growth < 1.0
    assert bad.growth > 10.0
    assert len(good.points) == 45
    with pytest.raises(ConfigError):
        check_subgaussian_envelope(sol, 2.0, 1, A, mode="other")


def test_mean_value_constant_field():
    grid = RadialGrid(ModelManifold.euclidean(2), 5.0, 100)
    times = np.linspace(0.0, 4.0, 41)
    tr = Trace(grid, times, np.full((41, 100), 0.3), 2.0)
    for T in (1.0, 4.0):
        ratio, res = check_mean_value_scaleinv(tr, 2.0, 2.0, T)
        assert ratio == pytest.approx(1.0, rel=1e-12)
        assert res.passed
    with pytest.raises(InsufficientData):
        check_mean_value_scaleinv(tr, 2.0, 2.0, 16.0)


def test_mean_value_band():
    assert mean_value_band([1.0, 3.9]).passed
    assert not mean_value_band([1.0, 4.1]).passed
    with pytest.raises(InsufficientData):
        mean_value_band([1.0])


def test_stability_needs_doubled_window(heat_trace):
    _, tr = heat_trace
    gamma = RegularFunctionSpec(0.5)
    # elapsed time is 4, the doubled window for rho = 1.5 is 4.5
    with pytest.raises(InsufficientData):
        neighborhood_decay_stability(tr, 2.0, 1.5, gamma, Region(1.0))
    first, second, ratio = neighborhood_decay_stability(tr, 2.0, 1.4, gamma, Region(1.0))
    assert math.isfinite(ratio) and ratio >= 1.0
