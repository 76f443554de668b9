import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trudinger.constants import zeta_barenblatt
from trudinger.errors import DomainError
from trudinger.exact import (
    ExactSolution,
    lambda_integral,
    lambda_norm_log_derivative,
    pde_residual,
    residual_order,
    sample,
    sample_trace,
    self_similar_profile_ode_residual,
    tail_radius,
    weighted_mass,
)
from trudinger.fields import RadialGrid


def test_heat_kernel_values():
    # p = 2, n = 1: u = t^{-1/2} exp(-r^2 / (4t))
    sol = ExactSolution.barenblatt(2.0, 1)
    assert sol(0.0, 1.0) == 1.0
    assert sol(2.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert sol(0.0, 4.0) == pytest.approx(0.5, rel=1e-15)
    assert sol(4.0, 4.0) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-15)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_mass_is_conserved(p, n):
    sol = ExactSolution.barenblatt(p, n)
    m = sol.manifold()
    masses = [weighted_mass(sol, m, t) for t in (0.5, 1.0, 4.0)]
    np.testing.assert_allclose(masses, masses[0], rtol=1e-9)
    assert masses[0] == pytest.approx(lambda_integral(sol, 1.0, 1.0), rel=1e-9)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 3.0])
def test_profile_ode(p, s):
    sol = ExactSolution.barenblatt(p, 1)
    assert abs(self_similar_profile_ode_residual(sol, s)) < 1e-12
    scale = abs(sol.log_profile_derivative(s))
    assert abs(self_similar_profile_ode_residual(sol, s, zeta=1.1 * sol.zeta)) > 0.09 * scale


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("n", [1, 3])
def test_residual_small(p, n):
    sol = ExactSolution.barenblatt(p, n)
    m = sol.manifold()
    for r, t in [(0.5, 1.0), (1.3, 2.0), (2.0, 0.7)]:
        scale = abs(sol(r, t)) / t
        assert abs(pde_residual(sol, m, r, t, h=1e-3)) < 1e-4 * max(scale, 1e-3)


def test_residual_detects_wrong_equation():
    # the Euclidean n = 3 solution does not solve the n = 1 equation
    sol = ExactSolution.barenblatt(2.0, 3)
    wrong = ExactSolution.barenblatt(2.0, 1).manifold()
    assert abs(pde_residual(sol, wrong, 1.0, 1.0, h=1e-3)) > 1e-2


def test_residual_domain():
    sol = ExactSolution.barenblatt(2.0, 1)
    with pytest.raises(DomainError):
        pde_residual(sol, sol.manifold(), 1e-5, 1.0)
    with pytest.raises(DomainError):
        pde_residual(sol, sol.manifold(), 1.0, 1e-5, h=1e-3)
    with pytest.raises(DomainError):
        sol(1.0, 0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.5, 2.0, 2.7])
def test_polynomial_model_solution(alpha):
    sol = ExactSolution.polynomial_model(3.0, alpha)
    order, _ = residual_order(sol, sol.manifold(), 1.2, 1.5, 0.01 * 1.2)
    assert order == pytest.approx(2.0, abs=0.3)


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0])
@pytest.mark.parametrize("p, n", [(2.0, 1), (3.0, 2), (1.5, 3)])
def test_lambda_integral_closed_form(lam, p, n):
    from scipy import integrate

    sol = ExactSolution.barenblatt(p, n)
    m = sol.manifold()
    t = 1.7
    val, _ = integrate.quad(lambda r: r ** (n - 1) * sol(r, t) ** lam, 0, tail_radius(p, t, 1e-16),
                            epsabs=0, epsrel=1e-12, limit=200)
    assert m.omega * val == pytest.approx(lambda_integral(sol, lam, t), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(lam=st.one_of(st.floats(1.0, 20.0), st.just(math.inf)), t=st.floats(0.01, 100.0),
       p=st.floats(1.2, 4.0), n=st.integers(1, 4))
def test_norm_log_derivative_nonpositive(lam, t, p, n):
    assert lambda_norm_log_derivative(ExactSolution.barenblatt(p, n), lam, t) <= 0


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_tail_radius(p):
    sol = ExactSolution.barenblatt(p, 1)
    R = tail_radius(p, 2.0, 1e-10)
    assert sol(R, 2.0) / sol(0.0, 2.0) == pytest.approx(1e-10, rel=1e-10)


def test_sampling():
    sol = ExactSolution.barenblatt(2.0, 1)
    grid = RadialGrid(sol.manifold(), 10.0, 64)
    f = sample(sol, grid, 1.0)
    np.testing.assert_array_equal(f.values, sol(grid.centers, 1.0))
    tr = sample_trace(sol, grid, [1.0, 2.0])
    assert tr.values.shape == (2, 64)
    assert tr.meta["source"].startswith("exact")


def test_zeta_matches_constants():
    for p in (1.5, 2.0, 3.0):
        assert ExactSolution.barenblatt(p, 2).zeta == zeta_barenblatt(p)


def test_invalid_solution():
    with pytest.raises(DomainError):
        ExactSolution.barenblatt(1.0, 1)
    with pytest.raises(DomainError):
        ExactSolution(2.0, 3.0, 2)
