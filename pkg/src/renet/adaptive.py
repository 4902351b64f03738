"""Adaptive elastic net baseline: ridge pilot, inverse-power weights,
feature-space rescaling, weighted EN cross-validation, back-transform.

The weighting is implemented by dividing each column by its weight and
refitting on the rescaled design with a freshly computed lambda grid, so
one feature-specific factor scales both penalty components at once. The
internal CV centers each fold but deliberately does not re-standardize:
rescaled column lengths carry the adaptive information.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .crossval import _fold_split, _predict_original
from .model import CoefVector, Dataset, FitMetrics, r_squared
from .preprocess import StandardizationParams, TargetEncoder, fit_preprocess
from .solver import SolverConfig, default_lambda_grid, enet_path, lambda_max

__all__ = [
    "AenConfig",
    "AenFit",
    "ridge_solve",
    "ridge_pilot_cv",
    "adaptive_weights",
    "aen_fit_model",
    "aen_fit",
]


@dataclass(frozen=True)
class AenConfig:
    gamma: float = 1.0
    eps_tol: float = 1e-12
    alpha: float = 0.95
    k: int = 10
    pilot_grid_size: int = 50

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.eps_tol <= 0.0:
            raise ValueError(f"eps_tol must be > 0, got {self.eps_tol}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.pilot_grid_size < 1:
            raise ValueError("pilot_grid_size must be >= 1")


def _ridge_grid(x: np.ndarray, size: int) -> np.ndarray:
    # scale-aware span around the mean column energy; descending like the
    # lambda grids, so argmin ties resolve toward the larger penalty
    scale = float((x * x).sum()) / (x.shape[0] * x.shape[1])
    return np.geomspace(1e4 * scale, 1e-4 * scale, size)


def ridge_solve(x, y, mu: float) -> np.ndarray:
    """Ridge solution of (1/2n)||y - Xb||^2 + (mu/2)||b||^2 via SVD."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if mu < 0.0:
        raise ValueError("mu must be >= 0")
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    n = x.shape[0]
    return vt.T @ (s / (s**2 + n * mu) * (u.T @ y))


def _ridge_pilot(x, y, k: int, seed, grid_size: int) -> tuple[np.ndarray, float]:
    n = x.shape[0]
    k = min(k, n)
    grid = _ridge_grid(x, grid_size)
    mse = np.empty((grid.shape[0], k))
    rows = np.arange(n)
    for f, te in enumerate(_fold_split(n, k, seed)):
        tr = np.setdiff1d(rows, te)
        x_tr, y_tr = x[tr], y[tr]
        xm = x_tr.mean(axis=0)
        ym = float(y_tr.mean())
        u, s, vt = np.linalg.svd(x_tr - xm, full_matrices=False)
        uty = u.T @ (y_tr - ym)
        n_tr = tr.shape[0]
        x_te = x[te] - xm
        for gi, mu in enumerate(grid):
            beta = vt.T @ (s / (s**2 + n_tr * mu) * uty)
            pred = x_te @ beta + ym
            mse[gi, f] = float(np.mean((y[te] - pred) ** 2))
    gi = int(np.argmin(mse.mean(axis=1)))  # first hit = largest mu
    mu_star = float(grid[gi])
    return ridge_solve(x, y, mu_star), mu_star


def ridge_pilot_cv(x, y, k: int, seed: int = 0, grid_size: int = 50) -> CoefVector:
    """Ridge pilot at the CV-optimal penalty over a log-spaced grid.

    Expects standardized x and centered y.
    """
    beta, _ = _ridge_pilot(
        np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64),
        k, seed, grid_size,
    )
    return CoefVector(beta, 0.0, np.flatnonzero(beta))


def adaptive_weights(pilot, gamma: float, eps_tol: float) -> np.ndarray:
    """w_j = 1 / (|pilot_j|^gamma + eps_tol), finite and positive.

    eps_tol = 0 is allowed here for limit checks; AenConfig requires > 0.
    """
    vals = pilot.values if isinstance(pilot, CoefVector) else np.asarray(
        pilot, dtype=np.float64
    )
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    if eps_tol < 0.0:
        raise ValueError("eps_tol must be >= 0")
    return 1.0 / (np.abs(vals) ** gamma + eps_tol)


def _weighted_en_cv(x_t, y, alpha, lams, k, seed, cfg) -> np.ndarray:
    """Fold MSE along the lambda grid on the rescaled design.

    Per-fold centering only; the rescaled column lengths are the point of
    the transform and must survive into the solver.
    """
    n = x_t.shape[0]
    mse = np.empty((lams.shape[0], k))
    rows = np.arange(n)
    for f, te in enumerate(_fold_split(n, k, seed)):
        tr = np.setdiff1d(rows, te)
        xm = x_t[tr].mean(axis=0)
        ym = float(y[tr].mean())
        path = enet_path(
            np.asfortranarray(x_t[tr] - xm), y[tr] - ym, alpha, lams, cfg
        )
        x_te = x_t[te] - xm
        for i in range(lams.shape[0]):
            support = path.active_sets[i]
            if support.size == 0:
                pred = np.full(te.shape[0], ym)
            else:
                pred = x_te[:, support] @ path.coefs[i][support] + ym
            mse[i, f] = float(np.mean((y[te] - pred) ** 2))
    return mse


@dataclass(frozen=True)
class AenFit:
    """Adaptive EN result on the original feature scale."""

    coef: CoefVector
    encoder: TargetEncoder | None
    params: StandardizationParams
    metrics: FitMetrics
    weights: np.ndarray
    beta_raw: np.ndarray  # solution on the rescaled (weighted) design
    mu_pilot: float
    lambda_star: float
    converged: bool = True

    def predict(self, d) -> np.ndarray:
        return _predict_original(self.coef, self.encoder, d)


def aen_fit_model(
    d: Dataset,
    cfg: AenConfig | None = None,
    solver_cfg: SolverConfig | None = None,
    *,
    seed: int = 0,
    n_lambda: int = 100,
    encoder_folds: int = 5,
    _weights=None,
) -> AenFit:
    """Full adaptive EN pipeline on a raw dataset.

    _weights overrides the pilot-derived weights (test hook for the
    identity and degenerate cases).
    """
    cfg = cfg or AenConfig()
    solver_cfg = solver_cfg or SolverConfig()
    t0 = time.perf_counter()
    ready, enc, params = fit_preprocess(
        d, min(encoder_folds, d.n), np.random.SeedSequence(seed, spawn_key=(13,))
    )
    if _weights is None:
        pilot, mu = _ridge_pilot(
            ready.x,
            ready.y,
            min(cfg.k, ready.n),
            np.random.SeedSequence(seed, spawn_key=(17,)),
            cfg.pilot_grid_size,
        )
        w = adaptive_weights(pilot, cfg.gamma, cfg.eps_tol)
    else:
        w = np.asarray(_weights, dtype=np.float64)
        mu = float("nan")
    x_t = np.asfortranarray(ready.x / w)

    if lambda_max(x_t, ready.y, cfg.alpha) == 0.0:
        # orthogonal target: every grid head is empty, skip the CV
        beta_raw = np.zeros(ready.p)
        lam_star = 0.0
        path_ok = True
    else:
        lams = default_lambda_grid(x_t, ready.y, cfg.alpha, n_lambda)
        k = min(cfg.k, ready.n)
        mse = _weighted_en_cv(
            x_t, ready.y, cfg.alpha, lams, k,
            np.random.SeedSequence(seed, spawn_key=(19,)), solver_cfg,
        )
        li = int(np.argmin(mse.mean(axis=1)))  # descending grid: ties go large
        path = enet_path(x_t, ready.y, cfg.alpha, lams[: li + 1], solver_cfg)
        beta_raw = path.coefs[-1]
        lam_star = float(lams[li])
        path_ok = bool(path.converged[-1])

    beta_std = beta_raw / w
    coef_orig, intercept = params.back_map(beta_std)
    coef = CoefVector(coef_orig, intercept, np.flatnonzero(coef_orig))
    r2 = r_squared(d.y, _predict_original(coef, enc, d))
    metrics = FitMetrics(
        r2, coef.n_nonzero, float("nan"), time.perf_counter() - t0
    )
    return AenFit(coef, enc, params, metrics, w, beta_raw, mu, lam_star, path_ok)


def aen_fit(
    d: Dataset,
    cfg: AenConfig | None = None,
    solver_cfg: SolverConfig | None = None,
    **kwargs,
) -> tuple[CoefVector, FitMetrics]:
    m = aen_fit_model(d, cfg, solver_cfg, **kwargs)
    return m.coef, m.metrics
