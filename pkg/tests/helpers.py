"""Shared fixture builders for the test suite."""

from __future__ import annotations

import numpy as np


def std_cols(x: np.ndarray) -> np.ndarray:
    """Center columns and scale to population std 1 (so x_j' x_j = n)."""
    x = np.asarray(x, dtype=np.float64)
    x = x - x.mean(axis=0)
    return np.asfortranarray(x / np.sqrt((x**2).mean(axis=0)))


def correlated_design(n: int, p: int, rho: float, seed: int) -> np.ndarray:
    """Standardized draw with compound-symmetric population correlation rho."""
    rng = np.random.default_rng(seed)
    cov = np.full((p, p), rho)
    np.fill_diagonal(cov, 1.0)
    z = rng.standard_normal((n, p)) @ np.linalg.cholesky(cov).T
    return std_cols(z)


def centered(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    return y - y.mean()


def signflip_fixture():
    """Two near-duplicate columns with opposing partial effects.

    At lam = 0.5, alpha = 0.95 the elastic net keeps both columns positive
    while least squares on the pair is (+, -), so the relaxation dispatcher
    must take the refit branch.
    """
    rng = np.random.default_rng(11)
    n = 60
    u = rng.standard_normal(n)
    v = rng.standard_normal(n)
    x = std_cols(np.column_stack([u, u + 0.12 * v]))
    y = centered(x @ np.array([3.0, -1.0]) + 0.2 * rng.standard_normal(n))
    return x, y
