"""Config validation: defaults, range errors, unknown keys, round trip."""

import json

import pytest

from renet.adaptive import AenConfig
from renet.config import (
    ConfigError,
    default_config,
    load_schema,
    serialize,
    validate_config,
)
from renet.crossval import DEFAULT_THETA_GRID, GridSpec
from renet.solver import SolverConfig


def test_empty_object_fills_every_default():
    cfg = validate_config("{}")
    assert cfg.alpha == 0.95
    assert cfg.folds == 10
    assert cfg.seeds == (42, 123, 321)
    assert cfg.theta_grid == DEFAULT_THETA_GRID
    assert len(cfg.theta_grid) == 11
    assert cfg.models == ("en", "en1se", "aen", "renet", "renet1se")
    assert cfg.one_se_multiplier == 1.0
    assert cfg.n_lambda == 100
    assert cfg.encoder_folds == 5
    assert cfg.datasets == ()
    assert cfg.output_dir == "bench_out"
    assert cfg.target_col is None
    assert cfg.include_timing_in_csv is False
    assert cfg.signal_beta == 1.0
    assert cfg.preset is None
    assert cfg.solver == SolverConfig()
    assert cfg == default_config()


def test_schema_defaults_match_dataclass_defaults():
    # drift guard: the schema is the single source of defaults, so the
    # dataclass-level defaults must agree with it
    props = load_schema()["properties"]
    solver_defaults = {
        k: v["default"] for k, v in props["solver"]["properties"].items()
    }
    ref = SolverConfig()
    assert solver_defaults == {
        "tol": ref.tol,
        "max_iter": ref.max_iter,
        "min_ridge": ref.min_ridge,
    }
    aen_defaults = {
        k: v["default"] for k, v in props["aen"]["properties"].items()
    }
    aen_ref = AenConfig()
    assert aen_defaults == {
        "gamma": aen_ref.gamma,
        "eps_tol": aen_ref.eps_tol,
        "pilot_grid_size": aen_ref.pilot_grid_size,
    }
    assert props["alpha"]["default"] == aen_ref.alpha
    assert props["folds"]["default"] == aen_ref.k
    assert tuple(props["theta_grid"]["default"]) == DEFAULT_THETA_GRID


def test_aen_shares_bench_alpha_and_folds():
    cfg = validate_config(
        json.dumps({"alpha": 0.5, "folds": 4, "aen": {"gamma": 2.0}})
    )
    assert cfg.aen.alpha == 0.5
    assert cfg.aen.k == 4
    assert cfg.aen.gamma == 2.0
    assert cfg.aen.pilot_grid_size == 50


def test_alpha_range_error_names_field():
    with pytest.raises(ConfigError, match="alpha"):
        validate_config('{"alpha": 1.5}')
    with pytest.raises(ConfigError, match="alpha"):
        validate_config('{"alpha": 0.0}')


def test_theta_grid_must_contain_one():
    with pytest.raises(ConfigError, match="theta_grid"):
        validate_config('{"theta_grid": [0.0, 0.5]}')


def test_theta_grid_duplicates_rejected():
    with pytest.raises(ConfigError, match="distinct"):
        validate_config('{"theta_grid": [0.5, 0.5, 1.0]}')


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key 'alpa'"):
        validate_config('{"alpa": 0.9}')
    with pytest.raises(ConfigError, match="solver: unknown key"):
        validate_config('{"solver": {"tolerance": 0.1}}')


def test_parse_error_reports_position():
    with pytest.raises(ConfigError, match="line 1, column 2"):
        validate_config("{bad")
    with pytest.raises(ConfigError, match="JSON object"):
        validate_config("[1, 2]")


def test_type_and_range_errors():
    with pytest.raises(ConfigError, match="folds: expected integer"):
        validate_config('{"folds": 2.5}')
    with pytest.raises(ConfigError, match="folds: expected integer"):
        validate_config('{"folds": true}')
    with pytest.raises(ConfigError, match="folds: must be >= 2"):
        validate_config('{"folds": 1}')
    with pytest.raises(ConfigError, match=r"seeds\[0\]"):
        validate_config('{"seeds": ["a"]}')
    with pytest.raises(ConfigError, match="seeds"):
        validate_config('{"seeds": []}')
    with pytest.raises(ConfigError, match="models"):
        validate_config('{"models": ["ridge"]}')
    with pytest.raises(ConfigError, match="preset"):
        validate_config('{"preset": "laptop"}')


def test_round_trip_preserves_config():
    text = json.dumps(
        {
            "datasets": ["S6", "data/house.csv"],
            "models": ["en", "renet1se"],
            "seeds": [7],
            "folds": 5,
            "alpha": 0.8,
            "theta_grid": [0.0, 0.5, 1.0],
            "one_se_multiplier": 0.5,
            "target_col": "price",
            "solver": {"tol": 1e-7},
            "aen": {"gamma": 0.5},
        }
    )
    cfg = validate_config(text)
    again = validate_config(serialize(cfg))
    assert again == cfg
    assert again.solver.tol == 1e-7
    assert again.solver.max_iter == 10000


def test_theta_grid_sorted_and_usable():
    cfg = validate_config('{"theta_grid": [1.0, 0.0, 0.5]}')
    assert cfg.theta_grid == (0.0, 0.5, 1.0)
    GridSpec([1.0, 0.5], cfg.theta_grid, cfg.alpha)
