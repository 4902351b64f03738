"""Core value types shared across the renet estimators.

Matrices are float64 and column-major throughout; a Dataset's categorical
columns hold numeric category codes and are marked in ``categorical_mask``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateDataError",
    "Dataset",
    "Hyperparams",
    "CoefVector",
    "FitMetrics",
    "r_squared",
    "validate_dataset",
]


class DegenerateDataError(ValueError):
    """Raised when the data admits no meaningful fit (constant target, ...)."""


def _as_matrix(x) -> np.ndarray:
    x = np.asfortranarray(np.asarray(x, dtype=np.float64))
    if x.ndim != 2:
        raise ValueError(f"x must be 2-D, got ndim={x.ndim}")
    return x


def _as_vector(y) -> np.ndarray:
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if y.ndim != 1:
        raise ValueError(f"y must be 1-D, got ndim={y.ndim}")
    return y


@dataclass(frozen=True)
class Dataset:
    """Design matrix plus target.

    Attributes
    ----------
    x : (n, p) float64, column-major
    y : (n,) float64
    feature_names : one name per column
    categorical_mask : bool per column; True marks category-coded columns
    """

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    categorical_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _as_matrix(self.x))
        object.__setattr__(self, "y", _as_vector(self.y))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        mask = np.asarray(self.categorical_mask, dtype=bool)
        object.__setattr__(self, "categorical_mask", mask)
        if self.x.shape[0] != self.y.shape[0]:
            raise ValueError(
                f"x has {self.x.shape[0]} rows but y has {self.y.shape[0]}"
            )
        if len(self.feature_names) != self.x.shape[1]:
            raise ValueError("feature_names length does not match column count")
        if mask.shape != (self.x.shape[1],):
            raise ValueError("categorical_mask length does not match column count")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def take_rows(self, idx: np.ndarray) -> "Dataset":
        return Dataset(
            self.x[np.asarray(idx)],
            self.y[np.asarray(idx)],
            self.feature_names,
            self.categorical_mask,
        )


def make_dataset(x, y, feature_names=None, categorical_mask=None) -> Dataset:
    """Build a Dataset, filling default names (x1..xp) and an all-numeric mask."""
    x = _as_matrix(x)
    p = x.shape[1]
    if feature_names is None:
        feature_names = tuple(f"x{j + 1}" for j in range(p))
    if categorical_mask is None:
        categorical_mask = np.zeros(p, dtype=bool)
    return Dataset(x, y, feature_names, categorical_mask)


def validate_dataset(x, y, feature_names=None, categorical_mask=None) -> Dataset:
    """Coerce raw arrays into a Dataset, rejecting unusable input.

    Raises
    ------
    ValueError
        On dimension mismatch or non-finite entries.
    DegenerateDataError
        When there are fewer than 3 rows or no columns.
    """
    d = make_dataset(x, y, feature_names, categorical_mask)
    if d.n < 3:
        raise DegenerateDataError(f"need at least 3 rows, got {d.n}")
    if d.p < 1:
        raise DegenerateDataError("need at least one feature column")
    if not np.isfinite(d.x).all():
        raise ValueError("x contains NaN or Inf")
    if not np.isfinite(d.y).all():
        raise ValueError("y contains NaN or Inf")
    return d


@dataclass(frozen=True)
class Hyperparams:
    """One (lambda, alpha, theta) point.

    lam >= 0 is the overall penalty, alpha in [0, 1] the l1 mixing weight,
    theta in [0, 1] the relaxation level (theta = 0 is the unpenalized
    endpoint, theta = 1 leaves the elastic net solution untouched).
    """

    lam: float
    alpha: float
    theta: float = 1.0

    def __post_init__(self):
        if not (self.lam >= 0.0):
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not (0.0 <= self.theta <= 1.0):
            raise ValueError(f"theta must be in [0, 1], got {self.theta}")


@dataclass(frozen=True)
class CoefVector:
    """Coefficients plus intercept.

    Either full form (len(values) == p, support lists the nonzero columns) or
    restricted form (len(values) == len(support), one stored value per listed
    column). support is strictly increasing.
    """

    values: np.ndarray
    intercept: float
    support: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.ascontiguousarray(self.values, dtype=np.float64)
        )
        sup = np.ascontiguousarray(self.support, dtype=np.int64)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "intercept", float(self.intercept))
        if sup.size and np.any(np.diff(sup) <= 0):
            raise ValueError("support must be strictly increasing")
        if sup.size and sup[0] < 0:
            raise ValueError("support indices must be nonnegative")
        if self.values.shape[0] != sup.shape[0]:
            # full form: support indexes into values
            if sup.size and sup[-1] >= self.values.shape[0]:
                raise ValueError("support index out of range for full-form values")

    @property
    def restricted(self) -> bool:
        return self.values.shape[0] == self.support.shape[0]

    @property
    def n_nonzero(self) -> int:
        if self.restricted:
            return int(np.count_nonzero(self.values))
        return int(self.support.shape[0])

    def dense(self, p: int) -> np.ndarray:
        """Expand to a length-p vector on the original column indexing."""
        if not self.restricted:
            if self.values.shape[0] != p:
                raise ValueError("full-form values disagree with requested p")
            return self.values.copy()
        out = np.zeros(p)
        out[self.support] = self.values
        return out


@dataclass(frozen=True)
class FitMetrics:
    r2: float
    n_nonzero: int
    theta_selected: float
    wall_time_s: float


def r_squared(y_true, y_pred) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot.

    SS_tot is taken around the mean of y_true. Negative values are possible
    and meaningful (worse than the mean predictor); a perfect fit gives 1.0.

    Raises
    ------
    ValueError
        On length mismatch or fewer than 2 points.
    DegenerateDataError
        When y_true is constant (SS_tot == 0).
    """
    yt = _as_vector(y_true)
    yp = _as_vector(y_pred)
    if yt.shape != yp.shape:
        raise ValueError(f"length mismatch: {yt.shape[0]} vs {yp.shape[0]}")
    if yt.shape[0] < 2:
        raise ValueError("need at least 2 points")
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateDataError("y_true is constant; R^2 undefined")
    ss_res = float(np.sum((yt - yp) ** 2))
    return 1.0 - ss_res / ss_tot
