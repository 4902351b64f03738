import math

import numpy as np
import pytest

from helpers import centered, correlated_design, signflip_fixture, std_cols
from renet.model import Hyperparams
from renet.relaxation import (
    Branch,
    effective_theta,
    relax_solve,
    restricted_ols,
    theta_floor,
)
from renet.solver import SolverConfig, check_kkt, fit_enet

# ----------------------------------------------------------------------
# safeguards
# ----------------------------------------------------------------------


def test_theta_floor_frozen_values():
    # ln(4096) / (2 sqrt(64)) = 12 ln 2 / 16
    assert theta_floor(64, 4096) == pytest.approx(0.5198603854199589, abs=1e-12)
    assert theta_floor(100, 100) == 0.0
    assert theta_floor(100, 50) == 0.0
    assert theta_floor(99, 100) == pytest.approx(
        math.log(100) / (2 * math.sqrt(99)), abs=1e-15
    )
    # tiny n, huge p clamps at 1
    assert theta_floor(4, 3000) == 1.0


def test_theta_floor_validation():
    with pytest.raises(ValueError):
        theta_floor(0, 10)
    with pytest.raises(ValueError):
        theta_floor(10, 0)


def test_effective_theta_table():
    assert effective_theta(0.3, 5, 50, 0.0) == 0.3
    assert effective_theta(0.3, 5, 50, 0.6) == 0.6  # floor wins
    assert effective_theta(0.9, 5, 50, 0.6) == 0.9
    assert effective_theta(0.0, 50, 50, 0.0) == 1.0  # saturated
    assert effective_theta(0.0, 51, 50, 0.2) == 1.0
    with pytest.raises(ValueError):
        effective_theta(1.2, 1, 10, 0.0)
    with pytest.raises(ValueError):
        effective_theta(0.5, 1, 10, 1.5)


# ----------------------------------------------------------------------
# restricted least squares
# ----------------------------------------------------------------------


def test_restricted_ols_orthogonal():
    from renet.analytic import orthogonal_design

    x = orthogonal_design(32, 4, seed=9)
    rng = np.random.default_rng(9)
    y = centered(x @ np.array([1.0, -0.5, 0.0, 2.0]) + 0.3 * rng.standard_normal(32))
    b = restricted_ols(x, y)
    np.testing.assert_allclose(b, x.T @ y / 32, atol=1e-10)


def test_restricted_ols_duplicate_columns_split():
    rng = np.random.default_rng(15)
    u = rng.standard_normal(40)
    x = std_cols(np.column_stack([u, u]))
    y = centered(3.0 * x[:, 0] + 0.05 * rng.standard_normal(40))
    b = restricted_ols(x, y)
    # jittered Gram has cond ~ 2/min_ridge, so the split is equal only up
    # to conditioning-limited float error
    assert b[0] == pytest.approx(b[1], abs=1e-6)
    assert b[0] + b[1] == pytest.approx(3.0, abs=0.05)


def test_restricted_ols_empty():
    b = restricted_ols(np.zeros((10, 0)), np.ones(10))
    assert b.shape == (0,)


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------


def _active_fit(x, y, lam, alpha):
    fit = fit_enet(x, y, Hyperparams(lam, alpha))
    a = fit.coef.support
    return a, fit.coef.values[a]


def test_pass_through_is_bit_identical():
    x = correlated_design(50, 6, 0.3, 51)
    rng = np.random.default_rng(51)
    y = centered(x @ np.array([2.0, 0, -1.0, 0, 0, 0.5]) + rng.standard_normal(50))
    a, beta_a = _active_fit(x, y, 0.1, 0.95)
    rf = relax_solve(x[:, a], y, 0.1, 0.95, 1.0, 1.0, beta_a, support=a)
    assert rf.branch is Branch.PASS_THROUGH
    assert rf.theta_effective == 1.0
    np.testing.assert_array_equal(rf.coef.values, beta_a)
    np.testing.assert_array_equal(rf.coef.support, a)


def test_saturated_returns_input_unchanged():
    rng = np.random.default_rng(53)
    x = std_cols(rng.standard_normal((8, 20)))
    y = centered(rng.standard_normal(8))
    fit = fit_enet(x, y, Hyperparams(0.001, 1.0))
    a = fit.coef.support
    beta_a = fit.coef.values[a]
    assert a.size >= 8 - 1  # wide-problem fit goes dense at tiny penalty
    theta_eff = effective_theta(0.2, a.size, 8, theta_floor(8, 20))
    if a.size >= 8:
        assert theta_eff == 1.0
        rf = relax_solve(
            x[:, a], y, 0.001, 1.0, 0.2, theta_eff, beta_a, support=a, saturated=True
        )
        assert rf.branch is Branch.SATURATED
        np.testing.assert_array_equal(rf.coef.values, beta_a)


def test_saturated_requires_theta_one():
    with pytest.raises(ValueError):
        relax_solve(np.ones((4, 1)), np.ones(4), 0.1, 1.0, 0.2, 0.5,
                    np.array([1.0]), saturated=True)


def test_blend_matches_formula_exactly():
    x = correlated_design(60, 5, 0.2, 57)
    rng = np.random.default_rng(57)
    y = centered(x @ np.array([2.0, 1.5, 0, 0, -1.0]) + 0.3 * rng.standard_normal(60))
    a, beta_a = _active_fit(x, y, 0.08, 0.95)
    x_a = x[:, a]
    ols = restricted_ols(x_a, y)
    assert np.all(np.sign(ols) == np.sign(beta_a))  # fixture is sign-consistent
    for theta in (0.0, 0.4, 0.75):
        rf = relax_solve(x_a, y, 0.08, 0.95, theta, theta, beta_a, support=a)
        assert rf.branch is Branch.BLEND
        np.testing.assert_array_equal(
            rf.coef.values, theta * beta_a + (1.0 - theta) * ols
        )
    # theta_eff = 0 blend degenerates to the least squares solution
    rf0 = relax_solve(x_a, y, 0.08, 0.95, 0.0, 0.0, beta_a, support=a)
    np.testing.assert_array_equal(rf0.coef.values, ols)


def test_sign_flip_takes_refit_branch():
    x, y = signflip_fixture()
    lam, alpha = 0.5, 0.95
    a, beta_a = _active_fit(x, y, lam, alpha)
    assert a.size == 2  # both columns active
    ols = restricted_ols(x[:, a], y)
    assert np.sign(ols[1]) != np.sign(beta_a[1])
    rf = relax_solve(x[:, a], y, lam, alpha, 0.5, 0.5, beta_a, support=a)
    assert rf.branch is Branch.REFIT
    assert rf.converged
    dense = np.zeros(2)
    dense[rf.coef.support] = rf.coef.values
    assert check_kkt(x, y, dense, Hyperparams(0.5 * lam, alpha)) <= 1e-4


def test_zero_ols_coordinate_counts_as_mismatch():
    x = correlated_design(40, 2, 0.0, 61)
    rng = np.random.default_rng(61)
    y = centered(x @ np.array([1.5, 0.8]) + 0.2 * rng.standard_normal(40))
    beta_a = np.array([1.0, 0.5])
    rf = relax_solve(x, y, 0.1, 0.95, 0.5, 0.5, beta_a,
                     beta_ols=np.array([1.2, 0.0]))
    assert rf.branch is Branch.REFIT


def test_force_refit_and_support_mapping():
    x = correlated_design(50, 3, 0.1, 63)
    rng = np.random.default_rng(63)
    y = centered(x @ np.array([2.0, -1.0, 0.5]) + 0.2 * rng.standard_normal(50))
    a, beta_a = _active_fit(x, y, 0.05, 0.9)
    sup = np.array([4, 7, 11])[: a.size]
    rf = relax_solve(x[:, a], y, 0.05, 0.9, 0.6, 0.6, beta_a,
                     support=sup, force_refit=True)
    assert rf.branch is Branch.REFIT
    assert set(rf.coef.support.tolist()) <= set(sup.tolist())


def test_refit_support_never_grows():
    x, y = signflip_fixture()
    a, beta_a = _active_fit(x, y, 0.3, 0.95)
    for theta in (0.2, 0.5, 0.8):
        rf = relax_solve(x[:, a], y, 0.3, 0.95, theta, theta, beta_a, support=a)
        assert set(rf.coef.support.tolist()) <= set(a.tolist())


def test_precomputed_ols_matches_internal():
    x = correlated_design(45, 4, 0.3, 67)
    rng = np.random.default_rng(67)
    y = centered(x @ np.array([1.0, 0.5, -0.5, 2.0]) + 0.1 * rng.standard_normal(45))
    a, beta_a = _active_fit(x, y, 0.05, 0.95)
    x_a = x[:, a]
    ols = restricted_ols(x_a, y)
    rf1 = relax_solve(x_a, y, 0.05, 0.95, 0.3, 0.3, beta_a, support=a)
    rf2 = relax_solve(x_a, y, 0.05, 0.95, 0.3, 0.3, beta_a, support=a, beta_ols=ols)
    assert rf1.branch == rf2.branch
    np.testing.assert_array_equal(rf1.coef.values, rf2.coef.values)
