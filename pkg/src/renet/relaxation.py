"""Second-stage relaxation of an elastic net fit.

Given the active set A of a first-stage fit at (lam, alpha), the relaxed
estimator re-solves on the restricted columns with the penalty scaled down
to theta*lam. The dispatcher avoids the refit whenever a cheaper exact or
prescribed shortcut applies, and two safeguards bound theta from below:

* saturation: with p_active >= n_train the restricted least squares problem
  is underdetermined, so the effective theta snaps to 1 and the elastic net
  solution is kept unchanged;
* complexity floor: with p > n the requested theta is clamped to
  min(1, ln(p) / (2 sqrt(n))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import CoefVector, Hyperparams
from .solver import COND_LIMIT, SolverConfig, fit_enet

__all__ = [
    "Branch",
    "RelaxedFit",
    "theta_floor",
    "effective_theta",
    "restricted_ols",
    "relax_solve",
]


class Branch(Enum):
    PASS_THROUGH = "pass_through"
    BLEND = "blend"
    REFIT = "refit"
    SATURATED = "saturated"


@dataclass(frozen=True)
class RelaxedFit:
    """coef is restricted-form with support on the original column indices."""

    coef: CoefVector
    theta_requested: float
    theta_effective: float
    branch: Branch
    converged: bool = True


def theta_floor(n: int, p: int) -> float:
    """Lower bound on theta in underdetermined regimes.

    min(1, ln(p) / (2 sqrt(n))) when p > n, else 0.
    """
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    if p <= n:
        return 0.0
    return min(1.0, math.log(p) / (2.0 * math.sqrt(n)))


def effective_theta(theta: float, p_active: int, n_train: int, floor: float) -> float:
    """Apply saturation and the complexity floor to a requested theta."""
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    if not (0.0 <= floor <= 1.0):
        raise ValueError(f"floor must be in [0, 1], got {floor}")
    if p_active < 0 or n_train < 1:
        raise ValueError("p_active must be >= 0 and n_train >= 1")
    if p_active >= n_train:
        return 1.0
    return max(theta, floor)


def restricted_ols(x_a, y, cfg: SolverConfig | None = None) -> np.ndarray:
    """Least squares on the restricted columns.

    Solves the normal equations; when the Gram condition estimate exceeds
    1e10 (exact duplicates included) a min_ridge jitter makes the system
    well-posed, which splits weight equally across duplicated columns.
    """
    cfg = cfg or SolverConfig()
    x_a = np.asarray(x_a, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x_a.ndim != 2:
        raise ValueError("x_a must be 2-D")
    n, k = x_a.shape
    if n != y.shape[0]:
        raise ValueError("x_a and y row counts differ")
    if k == 0:
        return np.zeros(0)
    g = x_a.T @ x_a / n
    c = x_a.T @ y / n
    jitter = 0.0
    if k > n:
        jitter = cfg.min_ridge  # singular by shape
    else:
        cond = np.linalg.cond(g)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            jitter = cfg.min_ridge
    try:
        return np.linalg.solve(g + jitter * np.eye(k), c)
    except np.linalg.LinAlgError:
        return np.linalg.solve(g + max(jitter, cfg.min_ridge) * np.eye(k), c)


def _signs_consistent(beta_en: np.ndarray, beta_ols: np.ndarray) -> bool:
    # beta_ols_j == 0 counts as a mismatch: sign(en_j) is nonzero on the
    # active set by construction.
    return bool(np.all(np.sign(beta_en) == np.sign(beta_ols)))


def relax_solve(
    x_a,
    y,
    lam: float,
    alpha: float,
    theta_requested: float,
    theta_eff: float,
    beta_en,
    cfg: SolverConfig | None = None,
    *,
    support=None,
    saturated: bool = False,
    beta_ols=None,
    force_refit: bool = False,
) -> RelaxedFit:
    """Relax an elastic net solution on its active columns.

    Parameters
    ----------
    x_a : (n, |A|) restricted design (standardized), y : (n,) centered target.
    lam, alpha : first-stage penalty; the refit solves at theta_eff * lam.
    theta_eff : requested theta after ``effective_theta`` (callers pass the
        safeguarded value; theta_eff = 1 short-circuits to pass-through).
    beta_en : first-stage coefficients on A, all nonzero.
    support : original column indices of A (defaults to 0..|A|-1).
    saturated : True when p_active >= n_train forced theta_eff to 1.
    beta_ols : optional precomputed restricted least squares solution.
    force_refit : skip the blend shortcut (test hook for the exact solve).
    """
    cfg = cfg or SolverConfig()
    x_a = np.asfortranarray(np.asarray(x_a, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    beta_en = np.asarray(beta_en, dtype=np.float64)
    k = x_a.shape[1]
    if beta_en.shape[0] != k:
        raise ValueError("beta_en length does not match active column count")
    if support is None:
        support = np.arange(k, dtype=np.int64)
    else:
        support = np.ascontiguousarray(support, dtype=np.int64)
        if support.shape[0] != k:
            raise ValueError("support length does not match active column count")

    if saturated:
        if theta_eff != 1.0:
            raise ValueError("saturated relaxation requires theta_eff = 1")
        coef = CoefVector(beta_en.copy(), 0.0, support)
        return RelaxedFit(coef, theta_requested, 1.0, Branch.SATURATED)

    if theta_eff == 1.0 and not force_refit:
        coef = CoefVector(beta_en.copy(), 0.0, support)
        return RelaxedFit(coef, theta_requested, 1.0, Branch.PASS_THROUGH)

    if beta_ols is None:
        beta_ols = restricted_ols(x_a, y, cfg)
    else:
        beta_ols = np.asarray(beta_ols, dtype=np.float64)

    if not force_refit and _signs_consistent(beta_en, beta_ols):
        vals = theta_eff * beta_en + (1.0 - theta_eff) * beta_ols
        coef = CoefVector(vals, 0.0, support)
        return RelaxedFit(coef, theta_requested, theta_eff, Branch.BLEND)

    hp = Hyperparams(theta_eff * lam, alpha)
    fit = fit_enet(x_a, y, hp, cfg, warm=beta_en)
    vals = fit.coef.values
    nz = np.flatnonzero(vals)
    coef = CoefVector(vals[nz], 0.0, support[nz])
    return RelaxedFit(coef, theta_requested, theta_eff, Branch.REFIT, fit.converged)
