"""Joint K-fold cross-validation over the (lambda, theta) grid.

Each fold is preprocessed on its training split only, the lambda path is
solved once per fold, and every (lambda_i, theta_j) cell is relaxed and
scored on the held-out rows. Selection is either the surface minimum or
a parsimony-first one-standard-error rule. The final full-data refit maps
coefficients back to the original feature scale.

A plain elastic net CV (run_cv_en) shares the fold construction, the
preprocessing, the path solver and the prediction arithmetic, so the
theta = 1 column of the joint surface reproduces it bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import CoefVector, Dataset, FitMetrics, r_squared
from .preprocess import (
    StandardizationParams,
    TargetEncoder,
    fit_preprocess,
    standardize_fit_transform,
    target_encode_cross_fit,
    transform_holdout,
)
from .relaxation import (
    Branch,
    RelaxedFit,
    effective_theta,
    relax_solve,
    restricted_ols,
    theta_floor,
)
from .solver import SolverConfig, default_lambda_grid, enet_path

__all__ = [
    "DEFAULT_THETA_GRID",
    "GridSpec",
    "CvSurface",
    "SelectionRule",
    "Selection",
    "make_grid",
    "run_cv",
    "run_cv_en",
    "select_cv_min",
    "select_one_se",
    "pooled_se",
    "FittedModel",
    "fit_model",
    "fit_final",
]

# j/10 parses to the same double as the written-out decimal literals
DEFAULT_THETA_GRID = tuple(j / 10 for j in range(11))


@dataclass(frozen=True)
class GridSpec:
    """Search grid: descending lambdas, ascending thetas, fixed alpha.

    theta_grid must contain 1.0 so the plain elastic net solution stays in
    the search space.
    """

    lambda_grid: np.ndarray
    theta_grid: tuple
    alpha: float

    def __post_init__(self):
        lams = np.ascontiguousarray(self.lambda_grid, dtype=np.float64)
        object.__setattr__(self, "lambda_grid", lams)
        thetas = tuple(float(t) for t in self.theta_grid)
        object.__setattr__(self, "theta_grid", thetas)
        object.__setattr__(self, "alpha", float(self.alpha))
        if lams.ndim != 1 or lams.shape[0] == 0:
            raise ValueError("lambda_grid must be a nonempty 1-D array")
        if not np.isfinite(lams).all() or np.any(lams < 0.0):
            raise ValueError("lambda_grid must be finite and nonnegative")
        if lams.shape[0] > 1 and np.any(np.diff(lams) >= 0.0):
            raise ValueError("lambda_grid must be strictly decreasing")
        if len(thetas) == 0:
            raise ValueError("theta_grid must be nonempty")
        if any(not 0.0 <= t <= 1.0 for t in thetas):
            raise ValueError("theta values must lie in [0, 1]")
        if len(thetas) > 1 and any(
            b <= a for a, b in zip(thetas, thetas[1:])
        ):
            raise ValueError("theta_grid must be strictly increasing")
        if 1.0 not in thetas:
            raise ValueError("theta_grid must contain 1.0")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")

    @property
    def n_lambda(self) -> int:
        return self.lambda_grid.shape[0]

    @property
    def n_theta(self) -> int:
        return len(self.theta_grid)


@dataclass(frozen=True)
class CvSurface:
    """Held-out MSE per (lambda, theta, fold) plus fold-aggregated stats.

    bad_folds lists folds whose training target was constant; their cells
    hold the +inf sentinel, which propagates into mean_mse.
    """

    lambda_grid: np.ndarray
    theta_grid: tuple
    mse: np.ndarray  # (L, T, K)
    mean_mse: np.ndarray  # (L, T)
    se_mse: np.ndarray  # (L, T)
    bad_folds: tuple = ()

    @classmethod
    def from_folds(cls, lambda_grid, theta_grid, mse, bad_folds=()) -> "CvSurface":
        mse = np.asarray(mse, dtype=np.float64)
        if mse.ndim != 3:
            raise ValueError("mse must have shape (L, T, K)")
        ll, tt, kk = mse.shape
        if ll != len(lambda_grid) or tt != len(theta_grid):
            raise ValueError("mse shape does not match the grid")
        if kk < 2:
            raise ValueError("need at least 2 folds")
        mean = mse.mean(axis=2)
        with np.errstate(invalid="ignore"):
            se = mse.std(axis=2, ddof=1) / np.sqrt(kk)
        se[~np.isfinite(se)] = np.inf
        return cls(
            np.ascontiguousarray(lambda_grid, dtype=np.float64),
            tuple(float(t) for t in theta_grid),
            mse,
            mean,
            se,
            tuple(bad_folds),
        )

    @property
    def k(self) -> int:
        return self.mse.shape[2]


class SelectionRule(Enum):
    CV_MIN = "cv_min"
    ONE_SE = "one_se"


@dataclass(frozen=True)
class Selection:
    lambda_star: float
    theta_star: float
    rule: SelectionRule
    lambda_idx: int
    theta_idx: int


def make_grid(
    d: Dataset,
    alpha: float = 0.95,
    n_lambda: int = 100,
    theta_grid=DEFAULT_THETA_GRID,
) -> GridSpec:
    """Compute the lambda grid once on the full standardized dataset.

    Categorical columns are encoded with the full-data maps here (no
    cross-fitting), keeping the grid deterministic; the grid is a
    hyperparameter menu shared across folds, not a fitted statistic.
    """
    if d.categorical_mask.any():
        # folds do not matter: encoder maps come from all rows
        _, enc = target_encode_cross_fit(d, k_inner=2, seed=0)
        x = np.array(d.x, order="F", copy=True)
        for j, mapping in zip(enc.columns, enc.maps):
            x[:, j] = [mapping.get(float(v), enc.global_mean) for v in x[:, j]]
        d = Dataset(x, d.y, d.feature_names, np.zeros(d.p, bool))
    ready, _ = standardize_fit_transform(d)
    lams = default_lambda_grid(ready.x, ready.y, alpha, n_lambda)
    return GridSpec(lams, tuple(theta_grid), alpha)


def _fold_split(n: int, k: int, seed) -> list:
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, k)


def _encoder_seed(seed, fold_idx: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(7, fold_idx))


def _predict_restricted(x, support, values, offset: float) -> np.ndarray:
    """Held-out predictions from a restricted coefficient vector.

    Shared by the joint and the plain-EN CV paths so their theta = 1
    predictions are bitwise identical.
    """
    if support.size == 0:
        return np.full(x.shape[0], offset)
    return x[:, support] @ values + offset


def _prepare_fold(d_tr, d_te, cfg, encoder_folds, enc_seed):
    k_inner = min(encoder_folds, d_tr.n)
    ready, enc, params = fit_preprocess(d_tr, k_inner, enc_seed)
    ho = transform_holdout(enc, params, d_te)
    return ready, ho, params


def run_cv(
    d: Dataset,
    grid: GridSpec,
    k: int,
    seed: int,
    cfg: SolverConfig | None = None,
    *,
    encoder_folds: int = 5,
) -> CvSurface:
    """Joint (lambda, theta) K-fold cross-validation.

    Per fold: preprocess on the training split only, solve the lambda
    path, then relax every grid cell with the fold's effective theta and
    score the held-out MSE on the original y scale. Folds with a constant
    training target are flagged and filled with +inf.
    """
    cfg = cfg or SolverConfig()
    if not 2 <= k <= d.n:
        raise ValueError(f"k must be in [2, n={d.n}], got {k}")
    ll, tt = grid.n_lambda, grid.n_theta
    mse = np.empty((ll, tt, k))
    bad = []
    rows = np.arange(d.n)
    for f, te in enumerate(_fold_split(d.n, k, seed)):
        tr = np.setdiff1d(rows, te)
        d_tr = d.take_rows(tr)
        if np.ptp(d_tr.y) == 0.0:
            mse[:, :, f] = np.inf
            bad.append(f)
            continue
        mse[:, :, f] = _fold_surface(
            d_tr, d.take_rows(te), grid, cfg, encoder_folds, _encoder_seed(seed, f)
        )
    return CvSurface.from_folds(grid.lambda_grid, grid.theta_grid, mse, tuple(bad))


def _fold_surface(d_tr, d_te, grid, cfg, encoder_folds, enc_seed) -> np.ndarray:
    ready, ho, params = _prepare_fold(d_tr, d_te, cfg, encoder_folds, enc_seed)
    path = enet_path(ready.x, ready.y, grid.alpha, grid.lambda_grid, cfg)
    n_tr, p_kept = ready.n, ready.p
    floor = theta_floor(n_tr, p_kept)
    y_te = ho.y
    out = np.empty((grid.n_lambda, grid.n_theta))
    for i in range(grid.n_lambda):
        support = path.active_sets[i]
        if support.size == 0:
            pred = np.full(d_te.n, params.y_mean)
            out[i, :] = float(np.mean((y_te - pred) ** 2))
            continue
        beta_a = path.coefs[i][support]
        x_a = np.asfortranarray(ready.x[:, support])
        saturated = support.size >= n_tr
        beta_ols = None
        if not saturated and any(
            max(t, floor) < 1.0 for t in grid.theta_grid
        ):
            beta_ols = restricted_ols(x_a, ready.y, cfg)
        lam = float(grid.lambda_grid[i])
        for j, theta in enumerate(grid.theta_grid):
            t_eff = effective_theta(theta, support.size, n_tr, floor)
            fit = relax_solve(
                x_a,
                ready.y,
                lam,
                grid.alpha,
                theta,
                t_eff,
                beta_a,
                cfg,
                support=support,
                saturated=saturated,
                beta_ols=beta_ols,
            )
            pred = _predict_restricted(
                ho.x, fit.coef.support, fit.coef.values, params.y_mean
            )
            out[i, j] = float(np.mean((y_te - pred) ** 2))
    return out


def run_cv_en(
    d: Dataset,
    grid: GridSpec,
    k: int,
    seed: int,
    cfg: SolverConfig | None = None,
    *,
    encoder_folds: int = 5,
) -> CvSurface:
    """Plain elastic net K-fold CV along the lambda grid.

    Ignores grid.theta_grid and never touches the relaxation code; the
    returned surface has a single theta column at 1.0.
    """
    cfg = cfg or SolverConfig()
    if not 2 <= k <= d.n:
        raise ValueError(f"k must be in [2, n={d.n}], got {k}")
    mse = np.empty((grid.n_lambda, 1, k))
    bad = []
    rows = np.arange(d.n)
    for f, te in enumerate(_fold_split(d.n, k, seed)):
        tr = np.setdiff1d(rows, te)
        d_tr = d.take_rows(tr)
        if np.ptp(d_tr.y) == 0.0:
            mse[:, :, f] = np.inf
            bad.append(f)
            continue
        d_te = d.take_rows(te)
        ready, ho, params = _prepare_fold(
            d_tr, d_te, cfg, encoder_folds, _encoder_seed(seed, f)
        )
        path = enet_path(ready.x, ready.y, grid.alpha, grid.lambda_grid, cfg)
        for i in range(grid.n_lambda):
            support = path.active_sets[i]
            beta_a = path.coefs[i][support]
            pred = _predict_restricted(ho.x, support, beta_a, params.y_mean)
            mse[i, 0, f] = float(np.mean((ho.y - pred) ** 2))
    return CvSurface.from_folds(grid.lambda_grid, (1.0,), mse, tuple(bad))


def select_cv_min(s: CvSurface) -> Selection:
    """Grid cell minimizing mean MSE; ties go to larger lambda, then theta.

    Raises
    ------
    ValueError
        If no cell is finite.
    """
    m = s.mean_mse
    finite = np.isfinite(m)
    if not finite.any():
        raise ValueError("CV surface has no finite cells")
    m_min = m[finite].min()
    cells = np.argwhere(m == m_min)
    i = int(cells[:, 0].min())  # lambda grid is descending
    j = int(cells[cells[:, 0] == i][:, 1].max())
    return Selection(
        float(s.lambda_grid[i]), float(s.theta_grid[j]), SelectionRule.CV_MIN, i, j
    )


def select_one_se(s: CvSurface, multiplier: float = 1.0) -> Selection:
    """Most parsimonious cell within multiplier * SE of the minimum.

    Band membership uses the SE at the minimizing cell. Within the band
    the largest lambda wins; among thetas at that lambda the lowest mean
    MSE wins, ties going to the smaller theta.
    """
    if multiplier < 0.0:
        raise ValueError("multiplier must be >= 0")
    base = select_cv_min(s)
    m = s.mean_mse
    cutoff = m[base.lambda_idx, base.theta_idx] + multiplier * s.se_mse[
        base.lambda_idx, base.theta_idx
    ]
    band = np.isfinite(m) & (m <= cutoff)
    i = int(np.flatnonzero(band.any(axis=1)).min())
    js = np.flatnonzero(band[i])
    j = int(js[np.argmin(m[i, js])])  # argmin takes the first, smaller theta
    return Selection(
        float(s.lambda_grid[i]), float(s.theta_grid[j]), SelectionRule.ONE_SE, i, j
    )


def pooled_se(scores) -> tuple[float, float]:
    """Grand mean and pooled SE over a seeds x folds score matrix.

    se^2 = (mean over seeds of the per-seed fold variance) / (S K)
         + (variance across seed means) / S, second term 0 when S = 1.
    """
    a = np.asarray(scores, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("scores must be a (seeds, folds) matrix")
    s, k = a.shape
    if s < 1 or k < 2:
        raise ValueError("need at least 1 seed and 2 folds")
    within = a.var(axis=1, ddof=1).mean() / (s * k)
    between = a.mean(axis=1).var(ddof=1) / s if s > 1 else 0.0
    return float(a.mean()), float(np.sqrt(within + between))


def _predict_original(coef: CoefVector, encoder, d) -> np.ndarray:
    """Predict on raw rows with original-scale coefficients."""
    if isinstance(d, Dataset):
        if encoder is not None and d.feature_names != encoder.feature_names:
            raise ValueError("column schema mismatch with the fitted encoder")
        x = d.x
    else:
        x = np.asarray(d, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != coef.values.shape[0]:
        raise ValueError("prediction input has the wrong number of columns")
    if encoder is not None:
        x = np.array(x, order="F", copy=True)
        for j, mapping in zip(encoder.columns, encoder.maps):
            x[:, j] = [mapping.get(float(v), encoder.global_mean) for v in x[:, j]]
    return x @ coef.values + coef.intercept


@dataclass(frozen=True)
class FittedModel:
    """Final full-data fit, ready to predict on raw (unstandardized) rows."""

    coef: CoefVector  # original feature scale, full form
    relaxed: RelaxedFit  # branch/theta record, original-scale coef
    selection: Selection
    encoder: TargetEncoder | None
    params: StandardizationParams
    metrics: FitMetrics

    def predict(self, d) -> np.ndarray:
        return _predict_original(self.coef, self.encoder, d)


def fit_model(
    d: Dataset,
    sel: Selection,
    grid: GridSpec,
    cfg: SolverConfig | None = None,
    *,
    seed: int = 0,
    encoder_folds: int = 5,
) -> FittedModel:
    """Full-data refit at the selected (lambda, theta).

    The lambda path is solved down to lambda_star with warm starts, the
    active set there is relaxed at effective_theta(theta_star, |A|, n,
    floor(n, p)), and coefficients are mapped back to the original scale.
    An empty active set yields an intercept-only model.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    ready, enc, params = fit_preprocess(
        d, min(encoder_folds, d.n), np.random.SeedSequence(seed, spawn_key=(11,))
    )
    prefix = grid.lambda_grid[: sel.lambda_idx + 1]
    path = enet_path(ready.x, ready.y, grid.alpha, prefix, cfg)
    support = path.active_sets[-1]
    floor = theta_floor(ready.n, ready.p)
    saturated = support.size >= ready.n
    theta_final = effective_theta(sel.theta_star, support.size, ready.n, floor)
    path_ok = bool(path.converged[-1])
    if support.size == 0:
        rel_support = support
        values_std = np.zeros(0)
        branch, converged = Branch.PASS_THROUGH, path_ok
    else:
        beta_a = path.coefs[-1][support]
        fit = relax_solve(
            np.asfortranarray(ready.x[:, support]),
            ready.y,
            float(sel.lambda_star),
            grid.alpha,
            sel.theta_star,
            theta_final,
            beta_a,
            cfg,
            support=support,
            saturated=saturated,
        )
        rel_support = fit.coef.support
        values_std = fit.coef.values
        branch, converged = fit.branch, fit.converged and path_ok

    beta_kept = np.zeros(ready.p)
    beta_kept[rel_support] = values_std
    coef_orig, intercept = params.back_map(beta_kept)
    coef = CoefVector(coef_orig, intercept, np.flatnonzero(coef_orig))
    relaxed = RelaxedFit(coef, sel.theta_star, theta_final, branch, converged)

    r2 = r_squared(d.y, _predict_original(coef, enc, d))
    metrics = FitMetrics(
        r2, coef.n_nonzero, sel.theta_star, time.perf_counter() - t0
    )
    return FittedModel(coef, relaxed, sel, enc, params, metrics)


def fit_final(
    d: Dataset,
    sel: Selection,
    grid: GridSpec,
    cfg: SolverConfig | None = None,
    **kwargs,
) -> tuple[RelaxedFit, FitMetrics]:
    m = fit_model(d, sel, grid, cfg, **kwargs)
    return m.relaxed, m.metrics
