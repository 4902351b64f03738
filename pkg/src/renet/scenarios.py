"""Synthetic regression designs with controlled feature correlation.

Ten canned scenarios (S1..S10) span dense and sparse signals over identity,
compound-symmetric, Toeplitz and block covariance families. Each (scenario
name, seed) pair owns its own PCG64 stream, so regeneration is bit-identical
and distinct scenarios never share draws even under the same seed.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .model import Dataset, make_dataset

__all__ = [
    "COV_KINDS",
    "SCENARIOS",
    "ScenarioSpec",
    "build_covariance",
    "signal_support",
    "sample_scenario",
    "dump_scenario",
]

COV_KINDS = ("identity", "compound_sym", "toeplitz", "block")


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one synthetic design.

    n, p and s count samples, features and signal features; rho sets the
    feature correlation level and sigma the noise standard deviation.
    sigma = 0 is allowed so noiseless draws can be used for exactness checks.
    """

    name: str
    n: int
    p: int
    s: int
    rho: float
    sigma: float
    cov_kind: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("name must be a nonempty string")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 0 <= self.s <= self.p:
            raise ValueError(f"s must lie in [0, p], got s={self.s} p={self.p}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.cov_kind not in COV_KINDS:
            raise ValueError(
                f"cov_kind must be one of {COV_KINDS}, got {self.cov_kind!r}"
            )


SCENARIOS: dict[str, ScenarioSpec] = {
    "S1": ScenarioSpec("S1", 100_000, 20, 10, 0.0, 1.0, "identity"),
    "S2": ScenarioSpec("S2", 5_000, 20, 5, 0.5, 2.0, "compound_sym"),
    "S3": ScenarioSpec("S3", 2_000, 20, 2, 0.75, 0.5, "compound_sym"),
    "S4": ScenarioSpec("S4", 1_000, 100, 10, 0.75, 2.0, "toeplitz"),
    "S5": ScenarioSpec("S5", 5_000, 100, 80, 0.5, 2.0, "compound_sym"),
    "S6": ScenarioSpec("S6", 500, 20, 2, 0.25, 1.0, "compound_sym"),
    "S7": ScenarioSpec("S7", 300, 300, 10, 0.5, 1.0, "compound_sym"),
    "S8": ScenarioSpec("S8", 90, 4_000, 100, 0.25, 0.25, "compound_sym"),
    "S9": ScenarioSpec("S9", 200, 220, 20, 0.75, 2.0, "compound_sym"),
    "S10": ScenarioSpec("S10", 300, 3_000, 30, 0.75, 2.0, "block"),
}


def build_covariance(spec: ScenarioSpec) -> np.ndarray:
    """Return the p x p feature covariance for the spec's cov_kind.

    identity: I. compound_sym: rho off the diagonal, 1 on it. toeplitz:
    rho^|i-j|. block: pairwise rho inside the leading s x s signal block,
    pairwise rho/2 inside the trailing noise block, zero across blocks,
    unit diagonal. All four are positive definite for rho in [0, 1).
    """
    p, rho = spec.p, spec.rho
    if spec.cov_kind == "identity":
        return np.eye(p)
    if spec.cov_kind == "compound_sym":
        cov = np.full((p, p), rho)
        np.fill_diagonal(cov, 1.0)
        return cov
    if spec.cov_kind == "toeplitz":
        lags = np.abs(np.arange(p)[:, None] - np.arange(p)[None, :])
        return np.asarray(rho**lags, dtype=np.float64)
    cov = np.zeros((p, p))
    cov[: spec.s, : spec.s] = rho
    cov[spec.s :, spec.s :] = rho / 2.0
    np.fill_diagonal(cov, 1.0)
    return cov


def signal_support(spec: ScenarioSpec) -> np.ndarray:
    """Indices of the s signal features.

    Block designs put the signal on the leading block (first s columns);
    everything else spreads it evenly with stride p // s.
    """
    if spec.s == 0:
        return np.empty(0, dtype=np.intp)
    if spec.cov_kind == "block":
        return np.arange(spec.s, dtype=np.intp)
    return np.arange(spec.s, dtype=np.intp) * (spec.p // spec.s)


def _scenario_bit_stream(name: str, seed: int) -> np.random.Generator:
    # crc32(name) keys the spawn so distinct scenarios draw from distinct
    # streams under a shared seed, reproducibly across platforms
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    key = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence(seed, spawn_key=(key,))
    return np.random.Generator(np.random.PCG64(ss))


def sample_scenario(
    spec: ScenarioSpec, seed: int, beta_value: float = 1.0
) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """Draw one dataset: X ~ N(0, Sigma) rowwise, y = X beta + sigma * eps.

    X is the standard normal block Z mapped through the lower Cholesky
    factor of Sigma; Z is drawn before eps, so the X draw is unchanged by
    sigma. Returns (dataset, beta_true, support_true).
    """
    cov = build_covariance(spec)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            f"covariance for scenario {spec.name!r} is not positive definite"
        ) from exc
    rng = _scenario_bit_stream(spec.name, seed)
    z = rng.standard_normal((spec.n, spec.p))
    eps = rng.standard_normal(spec.n)
    x = z @ chol.T
    support = signal_support(spec)
    beta = np.zeros(spec.p)
    beta[support] = beta_value
    y = x @ beta + spec.sigma * eps
    return make_dataset(x, y), beta, support


def dump_scenario(
    spec: ScenarioSpec,
    seed: int,
    out_dir,
    beta_value: float = 1.0,
) -> tuple[Path, Path]:
    """Write <name>_seed<seed>.csv plus a JSON sidecar; returns both paths.

    The CSV carries a header row and the target as its last column `y`.
    %.17g formatting makes the round trip exact for float64 and the bytes
    reproducible.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    d, beta, support = sample_scenario(spec, seed, beta_value=beta_value)
    stem = f"{spec.name}_seed{seed}"
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    header = ",".join(d.feature_names + ("y",))
    np.savetxt(
        csv_path,
        np.column_stack([d.x, d.y]),
        delimiter=",",
        header=header,
        comments="",
        fmt="%.17g",
    )
    meta = {
        "spec": asdict(spec),
        "seed": seed,
        "beta_value": beta_value,
        "beta_true": beta.tolist(),
        "support_true": support.tolist(),
    }
    json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path
