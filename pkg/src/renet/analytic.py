"""Closed-form ground truths on orthogonal designs, used as test oracles.

Everything here assumes standardized columns (x_j' x_j = n) and, where
orthogonality matters, X'X = n I, so each coordinate decouples and the
relaxed elastic net has an explicit solution.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "closed_form_renet",
    "recovery_ratio",
    "grouping_bound",
    "stabilized_objective",
    "orthogonal_design",
]


def _check_triplet(lam, alpha, theta):
    if lam < 0.0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must be in [0, 1], got {theta}")


def closed_form_renet(beta_ols_j: float, lam: float, alpha: float, theta: float) -> float:
    """Relaxed elastic net coordinate on an orthogonal design.

    sign(b) * max(|b| - theta*lam*alpha, 0) / (1 + theta*lam*(1 - alpha))
    with b the least squares coordinate (1/n) x_j' y. At theta -> 0 this
    returns b itself; at theta = 1 it is the plain elastic net coordinate.
    """
    _check_triplet(lam, alpha, theta)
    b = float(beta_ols_j)
    shrunk = max(abs(b) - theta * lam * alpha, 0.0)
    return math.copysign(shrunk, b) / (1.0 + theta * lam * (1.0 - alpha))


def recovery_ratio(theta: float, lam: float, alpha: float, abs_beta_ols: float) -> float:
    """|relaxed coordinate| / |least squares coordinate| on an orthogonal design.

    (1 - theta*lam*alpha / |b|) / (1 + theta*lam*(1 - alpha)), strictly
    decreasing in theta and -> 1 as theta -> 0. Only defined while the
    coordinate survives thresholding, i.e. |b| > theta*lam*alpha.
    """
    _check_triplet(lam, alpha, theta)
    if abs_beta_ols <= 0.0:
        raise ValueError("abs_beta_ols must be > 0")
    if abs_beta_ols <= theta * lam * alpha:
        raise ValueError(
            "coordinate is thresholded away: need |beta_ols| > theta*lam*alpha"
        )
    return (1.0 - theta * lam * alpha / abs_beta_ols) / (
        1.0 + theta * lam * (1.0 - alpha)
    )


def grouping_bound(theta: float, lam: float, alpha: float, y_norm: float, rho: float) -> float:
    """Upper bound on |beta_i - beta_j| for two columns at sample correlation rho.

    (1 / (theta*lam*(1-alpha))) * ||y||_2 * sqrt(2 (1 - rho)). Requires a
    strictly positive quadratic penalty; scales as 1/theta.
    """
    _check_triplet(lam, alpha, theta)
    if not (-1.0 <= rho <= 1.0):
        raise ValueError(f"rho must be in [-1, 1], got {rho}")
    if y_norm < 0.0:
        raise ValueError("y_norm must be >= 0")
    l2 = theta * lam * (1.0 - alpha)
    if l2 == 0.0:
        raise ValueError("bound requires theta*lam*(1-alpha) > 0")
    return y_norm * math.sqrt(2.0 * (1.0 - rho)) / l2


def stabilized_objective(beta, x, y, lam: float, alpha: float, theta: float) -> float:
    """Quadratic-plus-l1 form whose minimizer is the relaxed elastic net fit.

    With penalties scaled to the unnormalized squared loss (lam' = n*lam):

        J(b) = b'(X'X + theta*lam'*(1-alpha) I) b - 2 y'X b
               + 2*theta*lam'*alpha ||b||_1

    Convention: J is 2n times the half-mean-squared-error objective (up to
    the constant y'y), so the l1 weight carries a factor 2 and the quadratic
    term keeps X'X unnormalized; under this scaling argmin J coincides with
    the refit solution exactly. J(0) = 0, and at theta = 0 the quadratic
    part reduces to b'X'Xb - 2y'Xb, whose minimizer is least squares.
    """
    _check_triplet(lam, alpha, theta)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    n = x.shape[0]
    lam_n = n * lam
    k2 = theta * lam_n * (1.0 - alpha)
    k1 = theta * lam_n * alpha
    xb = x @ beta
    quad = float(xb @ xb + k2 * (beta @ beta))
    lin = 2.0 * float(y @ xb)
    return quad - lin + 2.0 * k1 * float(np.sum(np.abs(beta)))


def orthogonal_design(n: int, p: int, seed: int = 0) -> np.ndarray:
    """Random design with exactly orthogonal columns scaled to x_j' x_j = n."""
    if p > n:
        raise ValueError("orthogonal columns need p <= n")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    return np.asfortranarray(q * math.sqrt(n))
