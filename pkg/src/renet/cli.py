"""Command line interface: bench, fit, gen and cv-surface subcommands.

Settings come from an optional --config JSON file validated against the
shipped schema; command line flags override file values. Exit codes: 0 on
success, 1 on any fatal configuration problem, 2 when a benchmark dataset
errored (the run still completes for the others).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .adaptive import aen_fit_model
from .bench import (
    MODEL_ORDER,
    _resolve_spec,
    load_csv,
    run_benchmark,
    write_outputs,
)
from .config import BenchConfig, ConfigError, validate_config
from .crossval import (
    fit_model,
    make_grid,
    run_cv,
    run_cv_en,
    select_cv_min,
    select_one_se,
)
from .model import Dataset
from .scenarios import SCENARIOS, dump_scenario, sample_scenario

__all__ = ["main", "build_parser"]


def _split_list(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _int_list(text: str, field: str) -> list[int]:
    try:
        return [int(t) for t in _split_list(text)]
    except ValueError:
        raise ConfigError(f"{field}: expected comma-separated integers, got {text!r}") from None


def _float_list(text: str, field: str) -> list[float]:
    try:
        return [float(t) for t in _split_list(text)]
    except ValueError:
        raise ConfigError(f"{field}: expected comma-separated numbers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--data", action="append", default=[], metavar="CSV",
                   help="CSV dataset path (repeatable)")
    p.add_argument("--scenario", action="append", default=[], metavar="NAME",
                   help="synthetic scenario name S1..S10 (repeatable)")
    p.add_argument("--target-col", help="target column name (default: last column)")
    p.add_argument("--seeds", help="comma-separated integer seeds")
    p.add_argument("--folds", type=int, help="outer/CV fold count")
    p.add_argument("--alpha", type=float, help="l1 ratio in (0, 1]")
    p.add_argument("--theta-grid", help="comma-separated relaxation grid, must include 1.0")
    p.add_argument("--one-se-multiplier", type=float, help="width of the 1-SE band")
    p.add_argument("--out", help="output directory")
    p.add_argument("--preset", choices=["desk"], help="desk: laptop-scale scenario sizes")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="renet",
        description="Relaxed elastic net toolkit: benchmark, fit, data generation.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run the benchmark over datasets and seeds")
    _add_common(b)
    b.add_argument("--models", help=f"comma subset of {','.join(MODEL_ORDER)}")
    b.add_argument("--include-timing", action="store_const", const=True, default=None,
                   help="add time_s columns to rows.csv and summary.csv")
    b.set_defaults(func=_cmd_bench)

    f = sub.add_parser("fit", help="fit one model on one dataset, print coefficients")
    _add_common(f)
    f.add_argument("--model", choices=MODEL_ORDER, default="renet")
    f.set_defaults(func=_cmd_fit)

    g = sub.add_parser("gen", help="dump a synthetic scenario to CSV + JSON sidecar")
    _add_common(g)
    g.add_argument("--seed", type=int, help="draw seed (default: first config seed)")
    g.add_argument("--signal-beta", type=float, help="signal coefficient value")
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("cv-surface", help="dump the (lambda, theta) CV mean/SE grids")
    _add_common(s)
    s.set_defaults(func=_cmd_surface)
    return ap


def _merged_config(args) -> BenchConfig:
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    else:
        text = "{}"
    validate_config(text)  # report file problems before merging flags
    raw = json.loads(text)

    over = {}
    data = list(getattr(args, "data", []) or [])
    scen = list(getattr(args, "scenario", []) or [])
    if data or scen:
        over["datasets"] = data + scen
    if getattr(args, "models", None) is not None:
        over["models"] = _split_list(args.models)
    if getattr(args, "seeds", None) is not None:
        over["seeds"] = _int_list(args.seeds, "seeds")
    if getattr(args, "folds", None) is not None:
        over["folds"] = args.folds
    if getattr(args, "alpha", None) is not None:
        over["alpha"] = args.alpha
    if getattr(args, "theta_grid", None) is not None:
        over["theta_grid"] = _float_list(args.theta_grid, "theta_grid")
    if getattr(args, "one_se_multiplier", None) is not None:
        over["one_se_multiplier"] = args.one_se_multiplier
    if getattr(args, "out", None) is not None:
        over["output_dir"] = args.out
    if getattr(args, "target_col", None) is not None:
        over["target_col"] = args.target_col
    if getattr(args, "preset", None) is not None:
        over["preset"] = args.preset
    if getattr(args, "include_timing", None):
        over["include_timing_in_csv"] = True
    if getattr(args, "signal_beta", None) is not None:
        over["signal_beta"] = args.signal_beta
    raw.update(over)
    return validate_config(json.dumps(raw))


def _single_dataset(args) -> str:
    names = list(args.data) + list(args.scenario)
    if len(names) != 1:
        raise ConfigError("this command needs exactly one --data or --scenario")
    return names[0]


def _load_named(name: str, cfg: BenchConfig) -> Dataset:
    if name in SCENARIOS:
        spec = _resolve_spec(name, cfg.preset)
        d, _, _ = sample_scenario(spec, cfg.seeds[0], beta_value=cfg.signal_beta)
        return d
    return load_csv(name, cfg.target_col)


def _cmd_bench(args) -> int:
    cfg = _merged_config(args)
    rows, errors = run_benchmark(cfg)
    code = write_outputs(rows, errors, cfg)
    print(
        f"wrote {len(rows)} row(s) to {cfg.output_dir}"
        + (f"; {len(errors)} dataset error(s), see errors.csv" if errors else "")
    )
    return code


def _cmd_fit(args) -> int:
    cfg = _merged_config(args)
    name = _single_dataset(args)
    d = _load_named(name, cfg)
    model = args.model
    seed = cfg.seeds[0]
    if model == "aen":
        fit = aen_fit_model(
            d, cfg.aen, cfg.solver, seed=seed,
            n_lambda=cfg.n_lambda, encoder_folds=cfg.encoder_folds,
        )
        coef, metrics = fit.coef, fit.metrics
    else:
        plain = model in ("en", "en1se")
        thetas = (1.0,) if plain else cfg.theta_grid
        grid = make_grid(d, cfg.alpha, cfg.n_lambda, theta_grid=thetas)
        surface_fn = run_cv_en if plain else run_cv
        surf = surface_fn(
            d, grid, min(cfg.folds, d.n), seed, cfg.solver,
            encoder_folds=cfg.encoder_folds,
        )
        sel = (
            select_one_se(surf, cfg.one_se_multiplier)
            if model.endswith("1se")
            else select_cv_min(surf)
        )
        fm = fit_model(d, sel, grid, cfg.solver, seed=seed, encoder_folds=cfg.encoder_folds)
        coef, metrics = fm.coef, fm.metrics
    print(f"model={model} dataset={name} n={d.n} p={d.p}")
    print(
        f"r2={metrics.r2:.6f} n_coef={metrics.n_nonzero} "
        f"theta={metrics.theta_selected}"
    )
    print(f"intercept {float(coef.intercept)!r}")
    for j in coef.support:
        print(f"{d.feature_names[j]} {float(coef.values[j])!r}")
    return 0


def _cmd_gen(args) -> int:
    cfg = _merged_config(args)
    if args.data or len(args.scenario) != 1:
        raise ConfigError("gen needs exactly one --scenario")
    name = args.scenario[0]
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {list(SCENARIOS)}")
    spec = _resolve_spec(name, cfg.preset)
    seed = args.seed if args.seed is not None else cfg.seeds[0]
    csv_path, json_path = dump_scenario(
        spec, seed, cfg.output_dir, beta_value=cfg.signal_beta
    )
    print(csv_path)
    print(json_path)
    return 0


def _cmd_surface(args) -> int:
    cfg = _merged_config(args)
    name = _single_dataset(args)
    d = _load_named(name, cfg)
    grid = make_grid(d, cfg.alpha, cfg.n_lambda, theta_grid=cfg.theta_grid)
    surf = run_cv(
        d, grid, min(cfg.folds, d.n), cfg.seeds[0], cfg.solver,
        encoder_folds=cfg.encoder_folds,
    )
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = "lambda," + ",".join(f"theta_{t:g}" for t in grid.theta_grid)
    for fname, mat in (("mean_mse.csv", surf.mean_mse), ("se_mse.csv", surf.se_mse)):
        np.savetxt(
            out / fname,
            np.column_stack([grid.lambda_grid, mat]),
            delimiter=",", header=header, comments="", fmt="%.17g",
        )
    sel_min = select_cv_min(surf)
    sel_1se = select_one_se(surf, cfg.one_se_multiplier)
    print(f"wrote mean_mse.csv and se_mse.csv to {out}")
    print(f"cv-min: lambda={sel_min.lambda_star!r} theta={sel_min.theta_star!r}")
    print(f"one-se: lambda={sel_1se.lambda_star!r} theta={sel_1se.theta_star!r}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; map onto the documented
        # "fatal config error" code, keep 0 for --help
        return 0 if not exc.code else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
