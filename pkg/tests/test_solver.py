import numpy as np
import pytest

from helpers import centered, correlated_design, std_cols
from renet.model import Hyperparams
from renet.solver import (
    SolverConfig,
    check_kkt,
    default_lambda_grid,
    enet_objective,
    enet_path,
    fit_enet,
    lambda_max,
    soft_threshold,
)

# ----------------------------------------------------------------------
# soft_threshold
# ----------------------------------------------------------------------


def test_soft_threshold_frozen_values():
    assert soft_threshold(1.3, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert soft_threshold(-2.0, 0.5) == pytest.approx(-1.5, abs=1e-15)
    assert soft_threshold(0.2, 0.5) == 0.0


def test_soft_threshold_properties():
    rng = np.random.default_rng(5)
    z = rng.standard_normal(200) * 3
    t = np.abs(rng.standard_normal(200))
    out = soft_threshold(z, t)
    # shrinks toward zero, never past it, and is odd in z
    assert np.all(np.abs(out) <= np.abs(z))
    assert np.all(np.abs(out) <= np.maximum(np.abs(z) - t, 0.0) + 1e-15)
    np.testing.assert_allclose(soft_threshold(-z, t), -out, atol=0)


def test_soft_threshold_rejects_negative_threshold():
    with pytest.raises(ValueError):
        soft_threshold(1.0, -0.1)


# ----------------------------------------------------------------------
# lambda_max and the default grid
# ----------------------------------------------------------------------


def test_lambda_max_frozen_example():
    x = np.array([[1.0], [-1.0]])
    y = np.array([1.0, -1.0])
    assert lambda_max(x, y, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_lambda_max_zero_target_and_alpha_error():
    x = std_cols(np.random.default_rng(0).standard_normal((10, 3)))
    assert lambda_max(x, np.zeros(10), 0.5) == 0.0
    with pytest.raises(ValueError):
        lambda_max(x, np.zeros(10), 0.0)


def test_all_zero_at_and_above_lambda_max():
    rng = np.random.default_rng(8)
    x = correlated_design(40, 6, 0.4, 8)
    y = centered(x @ np.array([1.0, -2.0, 0, 0, 0.5, 0]) + rng.standard_normal(40))
    lam = lambda_max(x, y, 0.9)
    for mult in (1.0 + 1e-9, 1.5, 4.0):
        fit = fit_enet(x, y, Hyperparams(lam * mult, 0.9))
        assert fit.converged
        assert np.all(fit.coef.values == 0.0)


def test_default_grid_shape_and_ratio():
    rng = np.random.default_rng(2)
    x_tall = correlated_design(50, 5, 0.0, 2)
    y = centered(rng.standard_normal(50))
    grid = default_lambda_grid(x_tall, y, 0.95)
    assert grid.shape == (100,)
    assert np.all(np.diff(grid) < 0)
    assert grid[0] == pytest.approx(lambda_max(x_tall, y, 0.95), rel=2e-9)
    assert grid[-1] / grid[0] == pytest.approx(1e-3, rel=1e-9)  # n > p

    x_wide = std_cols(rng.standard_normal((10, 20)))
    y2 = centered(rng.standard_normal(10))
    grid2 = default_lambda_grid(x_wide, y2, 0.95)
    assert grid2[-1] / grid2[0] == pytest.approx(1e-2, rel=1e-9)  # n <= p


# ----------------------------------------------------------------------
# fit_enet against independent oracles
# ----------------------------------------------------------------------


def test_orthogonal_design_matches_coordinatewise_shrinkage():
    from renet.analytic import orthogonal_design

    x = orthogonal_design(64, 8, seed=4)
    rng = np.random.default_rng(4)
    beta = np.array([2.0, -1.0, 0.5, 0.0, 0.0, 3.0, -0.2, 0.05])
    y = centered(x @ beta + 0.5 * rng.standard_normal(64))
    b_ols = x.T @ y / 64
    for lam, alpha in [(0.3, 1.0), (0.3, 0.7), (1.0, 0.95), (0.05, 0.5)]:
        fit = fit_enet(x, y, Hyperparams(lam, alpha))
        expect = soft_threshold(b_ols, lam * alpha) / (1.0 + lam * (1.0 - alpha))
        np.testing.assert_allclose(fit.coef.values, expect, atol=1e-9)


def test_frozen_brute_force_instance_p2():
    # Nelder-Mead oracle on the objective, computed once and frozen.
    rng = np.random.default_rng(7)
    z = rng.standard_normal((24, 2))
    x = std_cols(np.column_stack([z[:, 0], 0.6 * z[:, 0] + 0.8 * z[:, 1]]))
    y = centered(x @ np.array([1.5, -0.5]) + 0.3 * rng.standard_normal(24))
    fit = fit_enet(x, y, Hyperparams(0.25, 0.9))
    np.testing.assert_allclose(fit.coef.values, [0.859097884933, 0.0], atol=1e-6)


def test_frozen_brute_force_instance_p3():
    rng = np.random.default_rng(19)
    z = rng.standard_normal((30, 3))
    cov = np.array([[1, 0.4, 0.2], [0.4, 1, 0.5], [0.2, 0.5, 1.0]])
    x = std_cols(z @ np.linalg.cholesky(cov).T)
    y = centered(x @ np.array([1.0, 0.0, -2.0]) + 0.5 * rng.standard_normal(30))
    fit = fit_enet(x, y, Hyperparams(0.15, 0.8))
    np.testing.assert_allclose(
        fit.coef.values, [0.672086265244, 0.0, -1.66927718265], atol=1e-6
    )


def test_objective_nonincreasing_over_sweeps():
    rng = np.random.default_rng(13)
    x = correlated_design(60, 12, 0.6, 13)
    y = centered(x @ rng.standard_normal(12) + rng.standard_normal(60))
    lam, alpha = 0.2, 0.9
    prev = enet_objective(x, y, np.zeros(12), lam, alpha)
    # tol low enough that the budget, not the stopping rule, ends each run;
    # the sweep sequence for budget k is then a prefix of that for k+1
    for k in range(1, 12):
        cfg = SolverConfig(tol=1e-30, max_iter=k)
        fit = fit_enet(x, y, Hyperparams(lam, alpha), cfg)
        cur = enet_objective(x, y, fit.coef.values, lam, alpha)
        assert cur <= prev + 1e-12
        prev = cur


def test_warm_start_and_ordering_agree():
    rng = np.random.default_rng(23)
    x = correlated_design(80, 15, 0.5, 23)
    y = centered(x @ (rng.standard_normal(15) * (rng.random(15) < 0.5)) + rng.standard_normal(80))
    hp = Hyperparams(0.1, 0.9)
    cold = fit_enet(x, y, hp)
    rev = fit_enet(x, y, hp, order=np.arange(14, -1, -1))
    warm = fit_enet(x, y, hp, warm=cold.coef.values + 0.01)
    # lam > 0, alpha < 1: strictly convex, unique minimum
    np.testing.assert_allclose(rev.coef.values, cold.coef.values, atol=1e-5)
    np.testing.assert_allclose(warm.coef.values, cold.coef.values, atol=1e-5)


def test_nonconvergence_is_flagged_not_raised():
    x = correlated_design(40, 30, 0.95, 31)
    rng = np.random.default_rng(31)
    y = centered(x @ rng.standard_normal(30) + 0.1 * rng.standard_normal(40))
    fit = fit_enet(x, y, Hyperparams(1e-4, 1.0), SolverConfig(max_iter=2))
    assert not fit.converged


def test_lambda_zero_duplicate_columns_stays_finite():
    # jitter keeps the degenerate lam=0 problem solvable; the combined
    # weight on the duplicated pair is pinned, the split itself is not
    # (the nearly-flat valley means CD can certify before equalizing)
    rng = np.random.default_rng(17)
    u = rng.standard_normal(50)
    x = std_cols(np.column_stack([u, u, rng.standard_normal(50)]))
    y = centered(2.0 * x[:, 0] + x[:, 2] + 0.1 * rng.standard_normal(50))
    fit = fit_enet(x, y, Hyperparams(0.0, 1.0))
    assert fit.converged
    assert np.isfinite(fit.coef.values).all()
    # oracle: collapse the pair into one column, the combined weight is OLS
    ols2, *_ = np.linalg.lstsq(x[:, [0, 2]], y, rcond=None)
    total = fit.coef.values[0] + fit.coef.values[1]
    assert total == pytest.approx(ols2[0], abs=1e-4)
    assert fit.coef.values[2] == pytest.approx(ols2[1], abs=1e-4)


def test_lambda_zero_underdetermined_uses_jitter():
    rng = np.random.default_rng(29)
    x = std_cols(rng.standard_normal((10, 25)))
    y = centered(rng.standard_normal(10))
    fit = fit_enet(x, y, Hyperparams(0.0, 0.5))
    assert fit.converged
    assert np.isfinite(fit.coef.values).all()


# ----------------------------------------------------------------------
# path and KKT
# ----------------------------------------------------------------------


def test_path_head_is_exactly_zero():
    rng = np.random.default_rng(37)
    for seed in range(5):
        x = correlated_design(50, 8, 0.3, 100 + seed)
        y = centered(x @ rng.standard_normal(8) + rng.standard_normal(50))
        grid = default_lambda_grid(x, y, 0.95, n_lambda=20)
        path = enet_path(x, y, 0.95, grid)
        assert np.all(path.coefs[0] == 0.0)
        assert path.active_sets[0].size == 0
        assert path.converged.all()


def test_path_matches_cold_solves():
    rng = np.random.default_rng(41)
    x = correlated_design(60, 10, 0.4, 41)
    y = centered(x @ rng.standard_normal(10) + rng.standard_normal(60))
    grid = default_lambda_grid(x, y, 0.9, n_lambda=12)
    path = enet_path(x, y, 0.9, grid)
    for i in (3, 7, 11):
        cold = fit_enet(x, y, Hyperparams(float(grid[i]), 0.9))
        np.testing.assert_allclose(path.coefs[i], cold.coef.values, atol=1e-5)


def test_kkt_on_converged_fits():
    for seed in range(6):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(30, 120))
        p = int(rng.integers(3, 40))
        x = correlated_design(n, p, float(rng.random() * 0.7), seed + 500)
        beta = rng.standard_normal(p) * (rng.random(p) < 0.4)
        y = centered(x @ beta + rng.standard_normal(n))
        hp = Hyperparams(0.2 * float(rng.random()) + 0.02, 0.95)
        fit = fit_enet(x, y, hp)
        assert fit.converged
        assert check_kkt(x, y, fit.coef.values, hp) <= 1e-4


def test_kkt_detects_perturbation():
    rng = np.random.default_rng(43)
    x = correlated_design(50, 6, 0.2, 43)
    y = centered(x @ np.array([1.0, 0, 0, -1.0, 0, 0.5]) + rng.standard_normal(50))
    hp = Hyperparams(0.1, 0.9)
    fit = fit_enet(x, y, hp)
    good = check_kkt(x, y, fit.coef.values, hp)
    bad = fit.coef.values.copy()
    bad[0] += 0.05
    assert check_kkt(x, y, bad, hp) > max(10 * good, 1e-3)


def test_check_kkt_length_mismatch():
    x = np.ones((4, 2))
    with pytest.raises(ValueError):
        check_kkt(x, np.ones(4), np.ones(3), Hyperparams(0.1, 1.0))
