"""Standardization and cross-fitted target encoding.

Numeric columns are centered and scaled by the population std so that a
standardized column satisfies x_j'x_j = n exactly; y is centered. Columns
holding category codes are replaced in place by smoothed target means,
cross-fitted on the training split so that no row's encoding ever uses
its own y value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Dataset, DegenerateDataError

__all__ = [
    "StandardizationParams",
    "TargetEncoder",
    "standardize_fit_transform",
    "target_encode_cross_fit",
    "transform_holdout",
    "fit_preprocess",
]

# relative floor below which a column counts as zero-variance
_SCALE_RTOL = 1e-12


@dataclass(frozen=True)
class StandardizationParams:
    """Centering/scaling statistics fitted on a training split.

    col_means and col_scales cover every original column; kept_mask marks
    the columns that survived the zero-variance drop. Scales are population
    standard deviations.
    """

    col_means: np.ndarray
    col_scales: np.ndarray
    kept_mask: np.ndarray
    y_mean: float
    warnings: tuple[str, ...] = ()

    @property
    def kept_idx(self) -> np.ndarray:
        return np.flatnonzero(self.kept_mask)

    def back_map(self, beta_std) -> tuple[np.ndarray, float]:
        """Map standardized-scale coefficients back to the original scale.

        beta_std has one entry per kept column. Returns (coef, intercept)
        with coef on all original columns (dropped ones get 0) such that
        x_orig @ coef + intercept reproduces x_std @ beta_std + y_mean.
        """
        beta_std = np.asarray(beta_std, dtype=np.float64)
        kept = self.kept_idx
        if beta_std.shape != kept.shape:
            raise ValueError("beta_std length does not match kept column count")
        coef = np.zeros(self.col_means.shape[0])
        coef[kept] = beta_std / self.col_scales[kept]
        intercept = self.y_mean - float(coef[kept] @ self.col_means[kept])
        return coef, intercept


@dataclass(frozen=True)
class TargetEncoder:
    """Full-training-data encoding maps for category-coded columns.

    maps[i] sends a category code of column columns[i] to its smoothed
    target mean; weights[i] records the shrinkage weight toward the
    global mean. Unseen codes map to global_mean.
    """

    columns: tuple[int, ...]
    feature_names: tuple[str, ...]
    maps: tuple[dict, ...]
    weights: tuple[dict, ...]
    global_mean: float


def _smoothed_means(codes: np.ndarray, y: np.ndarray) -> tuple[dict, dict, float]:
    """Per-category encodings on one data slice.

    encoded_c = (1 - B_c) * mean_c + B_c * global with
    B_c = s2_within / (s2_within + n_c * s2_between); when either variance
    estimate is degenerate the count-based fallback B_c = n_c/(n_c+10)
    applies. Either way B_c is in [0, 1], so encodings are convex
    combinations of category mean and global mean.
    """
    global_mean = float(y.mean())
    cats, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
    sums = np.bincount(inverse, weights=y)
    means = sums / counts
    n, n_groups = y.shape[0], cats.shape[0]

    s2_within = np.nan
    if n > n_groups:
        rss = float(np.sum((y - means[inverse]) ** 2))
        s2_within = rss / (n - n_groups)
    s2_between = np.var(means, ddof=1) if n_groups >= 2 else np.nan

    enc, wts = {}, {}
    for cat, mean_c, n_c in zip(cats, means, counts):
        denom = s2_within + n_c * s2_between
        if np.isfinite(denom) and denom > 0.0:
            b_c = s2_within / denom
        else:
            b_c = n_c / (n_c + 10.0)
        enc[float(cat)] = float((1.0 - b_c) * mean_c + b_c * global_mean)
        wts[float(cat)] = float(b_c)
    return enc, wts, global_mean


def _encode_column(values: np.ndarray, mapping: dict, default: float) -> np.ndarray:
    return np.array([mapping.get(float(v), default) for v in values])


def standardize_fit_transform(d: Dataset) -> tuple[Dataset, StandardizationParams]:
    """Center and scale columns to x_j'x_j = n, center y, drop constants.

    Zero-variance columns are dropped and recorded in params.warnings.

    Raises
    ------
    DegenerateDataError
        If every column is zero-variance.
    """
    means = d.x.mean(axis=0)
    scales = d.x.std(axis=0)
    rms = np.sqrt(np.mean(d.x**2, axis=0))
    kept = scales > _SCALE_RTOL * np.maximum(rms, 1e-300)
    if not kept.any():
        raise DegenerateDataError("every column has zero variance")
    warnings = tuple(
        f"dropped zero-variance column {d.feature_names[j]!r}"
        for j in np.flatnonzero(~kept)
    )
    params = StandardizationParams(means, scales, kept, float(d.y.mean()), warnings)
    x_std = (d.x[:, kept] - means[kept]) / scales[kept]
    names = tuple(nm for nm, k in zip(d.feature_names, kept) if k)
    out = Dataset(x_std, d.y - params.y_mean, names, np.zeros(int(kept.sum()), bool))
    return out, params


def target_encode_cross_fit(
    d: Dataset, k_inner: int = 5, seed: int = 0
) -> tuple[Dataset, TargetEncoder]:
    """Replace category-code columns by out-of-fold smoothed target means.

    Rows are split into k_inner shuffled folds; each row's encoding comes
    from the other folds only. The returned encoder holds full-data maps
    for transforming held-out rows. Dimensionality is preserved: one
    numeric column per categorical column, in place.

    Raises
    ------
    ValueError
        If no column is marked categorical, or k_inner is outside [2, n].
    """
    cols = np.flatnonzero(d.categorical_mask)
    if cols.size == 0:
        raise ValueError("categorical_mask marks no columns")
    if not 2 <= k_inner <= d.n:
        raise ValueError(f"k_inner must be in [2, n={d.n}], got {k_inner}")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(d.n)
    folds = np.array_split(perm, k_inner)

    x_new = np.array(d.x, order="F", copy=True)
    for rows in folds:
        comp = np.setdiff1d(perm, rows, assume_unique=True)
        for j in cols:
            enc, _, comp_global = _smoothed_means(d.x[comp, j], d.y[comp])
            x_new[rows, j] = _encode_column(d.x[rows, j], enc, comp_global)

    maps, weights = [], []
    for j in cols:
        enc, wts, _ = _smoothed_means(d.x[:, j], d.y)
        maps.append(enc)
        weights.append(wts)
    encoder = TargetEncoder(
        tuple(int(j) for j in cols),
        d.feature_names,
        tuple(maps),
        tuple(weights),
        float(d.y.mean()),
    )
    out = Dataset(x_new, d.y, d.feature_names, np.zeros(d.p, bool))
    return out, encoder


def transform_holdout(
    encoder: TargetEncoder | None,
    params: StandardizationParams,
    d: Dataset,
) -> Dataset:
    """Apply full-training-data encodings and standardization to new rows.

    Unseen category codes map to the encoder's global mean. y is returned
    untouched; predictions add params.y_mean back instead.

    Raises
    ------
    ValueError
        On a column-schema mismatch with the fitted artifacts.
    """
    if encoder is not None and d.feature_names != encoder.feature_names:
        raise ValueError("column schema mismatch between holdout data and encoder")
    if d.p != params.col_means.shape[0]:
        raise ValueError(
            f"holdout has {d.p} columns, params were fitted on "
            f"{params.col_means.shape[0]}"
        )
    x = np.array(d.x, order="F", copy=True)
    if encoder is not None:
        for j, mapping in zip(encoder.columns, encoder.maps):
            x[:, j] = _encode_column(x[:, j], mapping, encoder.global_mean)
    kept = params.kept_idx
    x_std = (x[:, kept] - params.col_means[kept]) / params.col_scales[kept]
    names = tuple(d.feature_names[j] for j in kept)
    return Dataset(x_std, d.y, names, np.zeros(kept.size, bool))


def fit_preprocess(
    d: Dataset, k_inner: int = 5, seed: int = 0
) -> tuple[Dataset, TargetEncoder | None, StandardizationParams]:
    """Encode (if any categorical columns) then standardize a training split."""
    encoder = None
    if d.categorical_mask.any():
        d, encoder = target_encode_cross_fit(d, k_inner, seed)
    ready, params = standardize_fit_transform(d)
    return ready, encoder, params
