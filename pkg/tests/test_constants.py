import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trudinger.constants import (
    IterationParams,
    c2_over_c1_closed_form,
    caccioppoli_constants,
    constants_table,
    epsilon_iteration,
    epsilon_iteration_term,
    iteration_bound,
    iteration_bound_special,
    lambda_threshold,
    log_iteration_bound,
    maximum_principle_coefficient,
    remark_ratio_bounds,
    sobolev_exponents,
    zeta_barenblatt,
    zeta_davies_gaffney,
)
from trudinger.errors import PreconditionError

# hand evaluations, frozen before running the code
C1_P2_L2 = 0.5
C2_P2_L2 = 17.0
ZETA_DG_P2_L2 = 1.0 / 34.0
ZETA_DG_P2_L4 = 3.0 / 73.0
EPS_THETA2_P2_L2_K1 = 1.0 / 136.0


def test_caccioppoli_p2_l2():
    c1, c2 = caccioppoli_constants(2.0, 2.0)
    assert c1 == pytest.approx(C1_P2_L2, rel=1e-12)
    assert c2 == pytest.approx(C2_P2_L2, rel=1e-12)
    assert c2 / c1 == pytest.approx(34.0, rel=1e-12)


@pytest.mark.parametrize("p, lam", [(2.0, 1.9), (3.0, 2.5), (1.5, 2.9)])
def test_lambda_threshold_enforced(p, lam):
    with pytest.raises(PreconditionError):
        caccioppoli_constants(p, lam)


@pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 3.0, 7.0])
def test_threshold_at_least_two(p):
    assert lambda_threshold(p) >= 2.0


@pytest.mark.parametrize("lam, expected", [(2.0, ZETA_DG_P2_L2), (4.0, ZETA_DG_P2_L4)])
def test_zeta_davies_gaffney(lam, expected):
    assert zeta_davies_gaffney(2.0, lam) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("lam", [3.0, 4.0, 8.0, 16.0])
def test_zeta_dg_positive_finite(p, lam):
    z = zeta_davies_gaffney(p, max(lam, lambda_threshold(p)))
    assert 0 < z < math.inf


def test_zeta_barenblatt():
    assert zeta_barenblatt(2.0) == 0.25
    assert zeta_barenblatt(3.0) == pytest.approx(4 * 3**-1.5, rel=1e-12)
    assert zeta_barenblatt(1.0 + 1e-8) < 1e-15


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("lam", [2.0, 4.0, 8.0, 16.0])
def test_remark_identity(p, lam):
    lam = max(lam, lambda_threshold(p))
    c1, c2 = caccioppoli_constants(p, lam)
    assert c2 / c1 == pytest.approx(c2_over_c1_closed_form(p, lam), rel=1e-12)


@pytest.mark.parametrize("n, p, kappa, expected", [
    (3, 2.0, 2.0, (3.0, 2.0 / 3.0)),
    (4, 2.0, 2.0, (2.0, 0.5)),
    (2, 3.0, 2.0, (2.0, 0.5)),
    (1, 2.0, 4.0, (4.0, 0.75)),
])
def test_sobolev_exponents(n, p, kappa, expected):
    k, nu = sobolev_exponents(n, p, kappa)
    assert k == pytest.approx(expected[0], rel=1e-12)
    assert nu == pytest.approx(expected[1], rel=1e-12)
    assert 0 < nu <= 1


def test_epsilon_example():
    eps, k = epsilon_iteration(2.0, 2.0, 2.0, return_argmin=True)
    assert k == 7
    assert eps == pytest.approx(1.50e-4, rel=5e-3)
    # brute force over k <= 100
    brute = min(epsilon_iteration_term(j, 2.0, 2.0, 2.0) for j in range(1, 101))
    assert eps == pytest.approx(brute, rel=1e-14)
    assert epsilon_iteration_term(1, 2.0, 2.0, 2.0) == pytest.approx(EPS_THETA2_P2_L2_K1, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(1.01, 50.0), p=st.floats(1.2, 5.0), extra=st.floats(0.0, 10.0))
def test_epsilon_bounds(theta, p, extra):
    lam = lambda_threshold(p) + extra
    eps = epsilon_iteration(theta, p, lam)
    assert 0 < eps <= epsilon_iteration_term(1, theta, p, lam)


def test_epsilon_rejects_theta():
    with pytest.raises(PreconditionError):
        epsilon_iteration(1.0, 2.0, 2.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_weight_condition_coefficient_is_sharp(p):
    # zeta_dg makes the Hamilton-Jacobi inequality an equality for the Lemma weight
    lam = lambda_threshold(p)
    zeta = zeta_davies_gaffney(p, lam)
    beta = p / (p - 1.0)
    coef = maximum_principle_coefficient(p, lam)
    assert coef * zeta ** (p - 1.0) * beta**p == pytest.approx(1.0 / (p - 1.0), rel=1e-12)


def test_iteration_bound_examples():
    assert iteration_bound(IterationParams(1.0, 1.0, 1.0, 1.0), 5) == pytest.approx(1.0, rel=1e-15)
    assert iteration_bound(IterationParams(1.0, 1.0, 1.0, 0.5), 2) == pytest.approx(0.0625, rel=1e-14)
    assert iteration_bound(IterationParams(2.0, 1.0, 1.0, 0.0), 3) == 0.0


def test_iteration_bound_instance():
    params = IterationParams(2.0, 4.0, 1.0, 1.0)
    J = 1.0
    for k in range(21):
        assert J <= iteration_bound(params, k) * (1 + 1e-12)
        J = (params.A**k / params.Theta) * J ** (1 + params.omega)


def test_iteration_bound_overflow_sentinel():
    params = IterationParams(0.5, 1e-3, 2.0, 10.0)
    assert iteration_bound(params, 40) == math.inf
    assert math.isfinite(log_iteration_bound(params, 10))


def test_iteration_params_validation():
    with pytest.raises(PreconditionError):
        IterationParams(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        IterationParams(1.0, 1.0, 1.0, -1.0)


def test_special_case_flag():
    assert IterationParams(4.0, 2.0, 1.0, 0.5).special_case
    assert not IterationParams(4.0, 1.0, 1.0, 1.0).special_case
    assert iteration_bound_special(IterationParams(4.0, 1.0, 1.0, 1.0), 3) is None
    assert iteration_bound_special(IterationParams(4.0, 2.0, 1.0, 0.5), 2) == pytest.approx(0.5 / 16, rel=1e-14)


def test_remark_ratio_examples():
    p_over_c1, c2_over_c1, c2 = remark_ratio_bounds(2.0, 2.0)
    assert p_over_c1 == pytest.approx(4.0, rel=1e-12)
    assert c2_over_c1 == pytest.approx(34.0, rel=1e-12)
    assert c2 == pytest.approx(17.0, rel=1e-12)
    for lam in (2.0, 3.0, 8.0, 64.0):
        assert remark_ratio_bounds(2.0, lam)[1] <= 34.0 * (1 + 1e-12)
    assert math.isfinite(remark_ratio_bounds(2.0, 8.0)[2])
    with pytest.raises(PreconditionError):
        remark_ratio_bounds(2.0, 1.5)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_remark_growth_constants_are_stable(p):
    # smallest C_p over a lambda sweep; doubling the sweep must not blow it up
    def fitted(lams):
        rows = [remark_ratio_bounds(p, lam) for lam in lams]
        a = max(r[0] / lam ** (p - 2) for r, lam in zip(rows, lams))
        b = max(r[1] for r in rows)
        c = max(r[2] / lam ** (2 - p) for r, lam in zip(rows, lams))
        return np.array([a, b, c])

    base = [max(lambda_threshold(p), 2.0) * 2**k for k in range(4)]
    wide = [max(lambda_threshold(p), 2.0) * 2**k for k in range(8)]
    f1, f2 = fitted(base), fitted(wide)
    assert np.all(np.isfinite(f2))
    assert np.all(f2 <= 2.0 * f1)


def test_constants_table_rows():
    table = constants_table(2.0, n=1, lam=2.0)
    rows = dict(table.rows())
    assert rows["c1"] == pytest.approx(0.5)
    assert rows["c2"] == pytest.approx(17.0)
    assert rows["zeta_dg"] == pytest.approx(1 / 34)
    assert rows["zeta_b"] == 0.25
    assert rows["Theta"] == pytest.approx(2.0**0.5)
    for name, value in constants_table(3.0, lam=3.0).rows():
        assert math.isfinite(value) and value > 0, name
