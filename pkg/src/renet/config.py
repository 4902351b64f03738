"""Benchmark configuration: JSON parsing, schema validation, defaults.

The shipped ``renet.schema.json`` is the single source of defaults; this
module walks it with a small validator (types, ranges, enums, unknown-key
rejection) instead of pulling in a schema library, so error messages can
name the offending field directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .adaptive import AenConfig
from .solver import SolverConfig

__all__ = [
    "ConfigError",
    "BenchConfig",
    "load_schema",
    "validate_config",
    "default_config",
    "serialize",
]

MODEL_NAMES = ("en", "en1se", "aen", "renet", "renet1se")


class ConfigError(ValueError):
    """Raised for unparseable, unknown, or out-of-range config input."""


def load_schema() -> dict:
    """Parse the packaged renet.schema.json."""
    text = resources.files("renet").joinpath("renet.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class BenchConfig:
    """Fully resolved benchmark settings (all defaults applied)."""

    datasets: tuple[str, ...]
    models: tuple[str, ...]
    seeds: tuple[int, ...]
    folds: int
    alpha: float
    theta_grid: tuple[float, ...]
    one_se_multiplier: float
    n_lambda: int
    encoder_folds: int
    output_dir: str
    target_col: str | None
    include_timing_in_csv: bool
    signal_beta: float
    preset: str | None
    solver: SolverConfig
    # aen carries the bench-level alpha and fold count already resolved;
    # only gamma, eps_tol and pilot_grid_size come from the aen block
    aen: AenConfig


def _type_ok(value, kind: str) -> bool:
    if kind == "null":
        return value is None
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "string":
        return isinstance(value, str)
    if kind == "array":
        return isinstance(value, list)
    if kind == "object":
        return isinstance(value, dict)
    raise AssertionError(f"schema uses unknown type {kind!r}")


def _check_value(value, schema: dict, path: str):
    kinds = schema.get("type")
    if kinds is not None:
        allowed = kinds if isinstance(kinds, list) else [kinds]
        if not any(_type_ok(value, k) for k in allowed):
            raise ConfigError(
                f"{path}: expected {' or '.join(allowed)}, "
                f"got {type(value).__name__}"
            )
    if value is None:
        return
    if "enum" in schema and value not in schema["enum"]:
        raise ConfigError(
            f"{path}: must be one of {schema['enum']}, got {value!r}"
        )
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if "minimum" in schema and value < schema["minimum"]:
            raise ConfigError(
                f"{path}: must be >= {schema['minimum']}, got {value}"
            )
        if "maximum" in schema and value > schema["maximum"]:
            raise ConfigError(
                f"{path}: must be <= {schema['maximum']}, got {value}"
            )
        if "exclusiveMinimum" in schema and value <= schema["exclusiveMinimum"]:
            raise ConfigError(
                f"{path}: must be > {schema['exclusiveMinimum']}, got {value}"
            )
    if isinstance(value, list):
        if "minItems" in schema and len(value) < schema["minItems"]:
            raise ConfigError(
                f"{path}: needs at least {schema['minItems']} item(s)"
            )
        item_schema = schema.get("items")
        if item_schema is not None:
            for i, item in enumerate(value):
                _check_value(item, item_schema, f"{path}[{i}]")


def _check_object(obj: dict, schema: dict, path: str) -> dict:
    """Validate an object, fill defaults, return the resolved dict."""
    props = schema.get("properties", {})
    if schema.get("additionalProperties") is False:
        for key in obj:
            if key not in props:
                raise ConfigError(
                    f"{path}: unknown key {key!r}" if path else
                    f"unknown key {key!r}"
                )
    resolved = {}
    for key, sub in props.items():
        sub_path = f"{path}.{key}" if path else key
        if key in obj:
            _check_value(obj[key], sub, sub_path)
            value = obj[key]
            if isinstance(value, dict):
                value = _check_object(value, sub, sub_path)
            resolved[key] = value
        else:
            default = sub.get("default")
            if isinstance(default, dict):
                default = _check_object(dict(default), sub, sub_path)
            resolved[key] = default
    return resolved


def validate_config(text: str) -> BenchConfig:
    """Parse JSON text, apply schema defaults, reject bad input.

    Raises ConfigError with the offending field (or the parse position for
    malformed JSON).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")
    schema = load_schema()
    resolved = _check_object(raw, schema, "")

    thetas = tuple(float(t) for t in resolved["theta_grid"])
    if 1.0 not in thetas:
        raise ConfigError("theta_grid: must contain 1.0")
    if len(set(thetas)) != len(thetas):
        raise ConfigError("theta_grid: values must be distinct")

    try:
        solver = SolverConfig(**resolved["solver"])
        aen = AenConfig(
            gamma=resolved["aen"]["gamma"],
            eps_tol=resolved["aen"]["eps_tol"],
            alpha=resolved["alpha"],
            k=resolved["folds"],
            pilot_grid_size=resolved["aen"]["pilot_grid_size"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return BenchConfig(
        datasets=tuple(resolved["datasets"]),
        models=tuple(resolved["models"]),
        seeds=tuple(int(s) for s in resolved["seeds"]),
        folds=resolved["folds"],
        alpha=float(resolved["alpha"]),
        theta_grid=tuple(sorted(thetas)),
        one_se_multiplier=float(resolved["one_se_multiplier"]),
        n_lambda=resolved["n_lambda"],
        encoder_folds=resolved["encoder_folds"],
        output_dir=resolved["output_dir"],
        target_col=resolved["target_col"],
        include_timing_in_csv=resolved["include_timing_in_csv"],
        signal_beta=float(resolved["signal_beta"]),
        preset=resolved["preset"],
        solver=solver,
        aen=aen,
    )


def default_config() -> BenchConfig:
    return validate_config("{}")


def serialize(cfg: BenchConfig) -> str:
    """JSON text that validate_config() round-trips to an equal config."""
    doc = {
        "datasets": list(cfg.datasets),
        "models": list(cfg.models),
        "seeds": list(cfg.seeds),
        "folds": cfg.folds,
        "alpha": cfg.alpha,
        "theta_grid": list(cfg.theta_grid),
        "one_se_multiplier": cfg.one_se_multiplier,
        "n_lambda": cfg.n_lambda,
        "encoder_folds": cfg.encoder_folds,
        "output_dir": cfg.output_dir,
        "target_col": cfg.target_col,
        "include_timing_in_csv": cfg.include_timing_in_csv,
        "signal_beta": cfg.signal_beta,
        "preset": cfg.preset,
        "solver": {
            "tol": cfg.solver.tol,
            "max_iter": cfg.solver.max_iter,
            "min_ridge": cfg.solver.min_ridge,
        },
        "aen": {
            "gamma": cfg.aen.gamma,
            "eps_tol": cfg.aen.eps_tol,
            "pilot_grid_size": cfg.aen.pilot_grid_size,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
