"""Benchmark harness: five estimators over CSV datasets and synthetic designs.

Per (dataset, seed) the rows are shuffle-split into K outer folds; per fold
every requested model is tuned and fit on the training block alone and
scored out of sample. The cv-min and 1-SE variants of the same estimator
share one CV surface per fold, so `en`/`en1se` and `renet`/`renet1se` rows
differ only in the selection rule applied to it.

Timing covers tuning plus the final fit; loading and synthetic generation
are excluded. The shared surface cost is charged to every model that
consumes it (the standalone-equivalent cost), so en and en1se report
near-identical times rather than splitting one run between them.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .adaptive import aen_fit_model
from .config import BenchConfig
from .crossval import (
    _fold_split,
    fit_model,
    make_grid,
    pooled_se,
    run_cv,
    run_cv_en,
    select_cv_min,
    select_one_se,
)
from .model import Dataset, make_dataset, r_squared
from .scenarios import SCENARIOS, ScenarioSpec, sample_scenario

__all__ = [
    "MODEL_ORDER",
    "BenchRow",
    "SummaryRow",
    "load_csv",
    "desk_spec",
    "run_benchmark",
    "aggregate_report",
    "write_outputs",
]

MODEL_ORDER = ("en", "en1se", "aen", "renet", "renet1se")

ROW_FIELDS = ("dataset", "model", "seed", "fold", "r2", "n_coef", "theta", "converged")


@dataclass(frozen=True)
class BenchRow:
    """One (dataset, model, seed, fold) out-of-sample result."""

    dataset: str
    model: str
    seed: int
    fold: int
    r2: float
    n_coef: int
    theta: float
    time_s: float
    converged: bool


@dataclass(frozen=True)
class SummaryRow:
    """Per (dataset, model) mean and pooled SE of every metric."""

    dataset: str
    model: str
    r2_mean: float
    r2_se: float
    n_coef_mean: float
    n_coef_se: float
    theta_mean: float
    theta_se: float
    time_mean: float
    time_se: float


def load_csv(path, target_col: str | None = None) -> Dataset:
    """Read a UTF-8 CSV with a header row into a Dataset.

    The target is `target_col` if given, else the last column. Columns
    whose cells do not all parse as floats are treated as categorical:
    distinct strings become integer codes (sorted order) and the column is
    flagged in categorical_mask.
    """
    p = Path(path)
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{p}: empty file") from None
        table = [row for row in reader if row]
    if not table:
        raise ValueError(f"{p}: no data rows")
    header = [h.strip() for h in header]
    if any(len(row) != len(header) for row in table):
        raise ValueError(f"{p}: ragged rows")
    if target_col is None:
        ti = len(header) - 1
    else:
        try:
            ti = header.index(target_col)
        except ValueError:
            raise ValueError(
                f"{p}: target column {target_col!r} not in header"
            ) from None
    try:
        y = np.array([float(row[ti]) for row in table])
    except ValueError:
        raise ValueError(f"{p}: target column {header[ti]!r} is not numeric") from None

    names, cols, cat = [], [], []
    for j, name in enumerate(header):
        if j == ti:
            continue
        raw = [row[j].strip() for row in table]
        try:
            col = np.array([float(v) for v in raw])
            is_cat = False
        except ValueError:
            codes = {v: float(c) for c, v in enumerate(sorted(set(raw)))}
            col = np.array([codes[v] for v in raw])
            is_cat = True
        names.append(name)
        cols.append(col)
        cat.append(is_cat)
    if not cols:
        raise ValueError(f"{p}: no feature columns")
    x = np.column_stack(cols)
    return Dataset(x, y, tuple(names), np.array(cat, dtype=bool))


def desk_spec(spec: ScenarioSpec) -> ScenarioSpec:
    """Laptop-scale surrogate: S1 shrinks to n=5000, p capped at 1000."""
    if spec.name == "S1":
        return replace(spec, n=5_000)
    if spec.p > 1_000:
        return replace(spec, p=1_000)
    return spec


def _resolve_spec(name: str, preset: str | None) -> ScenarioSpec:
    spec = SCENARIOS[name]
    return desk_spec(spec) if preset == "desk" else spec


def _inner_seed(seed: int, fold: int) -> int:
    # one derived stream per outer fold, disjoint from the (7,)/(11,)/...
    # spawn keys used inside the estimators
    ss = np.random.SeedSequence(seed, spawn_key=(23, fold))
    return int(ss.generate_state(1, np.uint64)[0])


def _run_unit(cfg: BenchConfig, models, name: str, seed: int, d: Dataset, fold: int):
    """All requested models on one outer fold; returns (rows, errors)."""
    te = _fold_split(d.n, cfg.folds, seed)[fold]
    tr = np.setdiff1d(np.arange(d.n), te)
    d_tr, d_te = d.take_rows(tr), d.take_rows(te)
    inner = _inner_seed(seed, fold)
    k = min(cfg.folds, d_tr.n)
    ef = cfg.encoder_folds
    rows, errors = [], []

    def note(model, exc):
        errors.append((name, f"{model} seed={seed} fold={fold}: {exc}"))

    pairs = (
        (("en", "en1se"), (1.0,), run_cv_en),
        (("renet", "renet1se"), cfg.theta_grid, run_cv),
    )
    for (m_min, m_1se), thetas, surface_fn in pairs:
        wanted = [m for m in (m_min, m_1se) if m in models]
        if not wanted:
            continue
        try:
            t0 = time.perf_counter()
            grid = make_grid(d_tr, cfg.alpha, cfg.n_lambda, theta_grid=thetas)
            surf = surface_fn(d_tr, grid, k, inner, cfg.solver, encoder_folds=ef)
            t_surf = time.perf_counter() - t0
        except Exception as exc:
            for m in wanted:
                note(m, exc)
            continue
        for m in wanted:
            try:
                t1 = time.perf_counter()
                sel = (
                    select_cv_min(surf)
                    if m == m_min
                    else select_one_se(surf, cfg.one_se_multiplier)
                )
                fit = fit_model(d_tr, sel, grid, cfg.solver, seed=inner, encoder_folds=ef)
                r2 = float(r_squared(d_te.y, fit.predict(d_te)))
                dt = t_surf + (time.perf_counter() - t1)
                rows.append(
                    BenchRow(
                        name, m, seed, fold, r2, fit.metrics.n_nonzero,
                        fit.metrics.theta_selected, dt, fit.relaxed.converged,
                    )
                )
            except Exception as exc:
                note(m, exc)

    if "aen" in models:
        try:
            t0 = time.perf_counter()
            fit = aen_fit_model(
                d_tr, cfg.aen, cfg.solver, seed=inner,
                n_lambda=cfg.n_lambda, encoder_folds=ef,
            )
            r2 = float(r_squared(d_te.y, fit.predict(d_te)))
            dt = time.perf_counter() - t0
            rows.append(
                BenchRow(
                    name, "aen", seed, fold, r2, fit.metrics.n_nonzero,
                    float("nan"), dt, fit.converged,
                )
            )
        except Exception as exc:
            note("aen", exc)
    return rows, errors


def _worker_count() -> int:
    env = os.environ.get("RENET_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"RENET_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def run_benchmark(cfg: BenchConfig) -> tuple[list[BenchRow], list[tuple[str, str]]]:
    """Run every requested (dataset, model, seed, fold) cell.

    Unreadable datasets become error entries and the run continues. Rows
    come back sorted by (dataset, model, seed, fold) regardless of worker
    scheduling. Synthetic scenarios are re-drawn per seed; CSV data is
    loaded once and only the fold split changes with the seed.
    """
    models = tuple(m for m in MODEL_ORDER if m in cfg.models)
    errors: list[tuple[str, str]] = []
    units = []
    for name in cfg.datasets:
        if name in SCENARIOS:
            spec = _resolve_spec(name, cfg.preset)
            for seed in cfg.seeds:
                d, _, _ = sample_scenario(spec, seed, beta_value=cfg.signal_beta)
                units.append((name, seed, d))
        else:
            try:
                d = load_csv(name, cfg.target_col)
            except (OSError, ValueError) as exc:
                errors.append((name, str(exc)))
                continue
            for seed in cfg.seeds:
                units.append((name, seed, d))

    rows: list[BenchRow] = []
    if models and units:
        tasks = [
            (name, seed, d, fold)
            for name, seed, d in units
            for fold in range(cfg.folds)
        ]
        with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
            futures = [
                pool.submit(_run_unit, cfg, models, name, seed, d, fold)
                for name, seed, d, fold in tasks
            ]
            for fut in futures:
                unit_rows, unit_errors = fut.result()
                rows.extend(unit_rows)
                errors.extend(unit_errors)
    rows.sort(key=lambda r: (r.dataset, r.model, r.seed, r.fold))
    errors.sort()
    return rows, errors


def _group_matrix(group: list[BenchRow], attr: str) -> np.ndarray:
    seeds = sorted({r.seed for r in group})
    folds = sorted({r.fold for r in group})
    m = np.full((len(seeds), len(folds)), np.nan)
    si = {s: i for i, s in enumerate(seeds)}
    fi = {f: i for i, f in enumerate(folds)}
    for r in group:
        m[si[r.seed], fi[r.fold]] = getattr(r, attr)
    return m


def _agg(scores: np.ndarray) -> tuple[float, float]:
    if scores.shape[1] < 2:
        return float(scores.mean()), float("nan")
    return pooled_se(scores)


def aggregate_report(rows: list[BenchRow]) -> list[SummaryRow]:
    """Collapse raw rows to per (dataset, model) means with pooled SEs."""
    groups: dict[tuple[str, str], list[BenchRow]] = {}
    for r in rows:
        groups.setdefault((r.dataset, r.model), []).append(r)
    out = []
    for (ds, model), group in sorted(groups.items()):
        stats = {}
        for attr in ("r2", "n_coef", "theta", "time_s"):
            stats[attr] = _agg(_group_matrix(group, attr))
        out.append(
            SummaryRow(
                ds, model,
                *stats["r2"], *stats["n_coef"], *stats["theta"], *stats["time_s"],
            )
        )
    return out


def _fmt(value: float, digits: int) -> str:
    return f"{value:.{digits}f}"


def render_summary_text(summary: list[SummaryRow], cfg: BenchConfig) -> str:
    """Aligned text report: per dataset, metric rows by model columns."""
    lines = ["renet benchmark summary"]
    lines.append(
        f"alpha={cfg.alpha} folds={cfg.folds} seeds={list(cfg.seeds)} "
        f"one_se_multiplier={cfg.one_se_multiplier}"
    )
    if cfg.preset == "desk":
        lines.append("preset: desk (S1 at n=5000; p capped at 1000 for S8/S10)")
    metric_rows = (
        ("R2", "r2_mean", "r2_se", 3),
        ("Num. Coeff.", "n_coef_mean", "n_coef_se", 1),
        ("Relaxation", "theta_mean", "theta_se", 3),
        ("Time (s)", "time_mean", "time_se", 2),
    )
    datasets = sorted({s.dataset for s in summary})
    for ds in datasets:
        cols = [s for s in summary if s.dataset == ds]
        cols.sort(key=lambda s: MODEL_ORDER.index(s.model))
        width = 18
        lines.append("")
        lines.append(f"dataset: {ds}")
        lines.append(
            "  " + "metric".ljust(14) + "".join(c.model.ljust(width) for c in cols)
        )
        for label, mkey, skey, digits in metric_rows:
            cells = [
                f"{_fmt(getattr(c, mkey), digits)} ({_fmt(getattr(c, skey), digits)})"
                for c in cols
            ]
            lines.append("  " + label.ljust(14) + "".join(c.ljust(width) for c in cells))
    return "\n".join(lines) + "\n"


def write_outputs(
    rows: list[BenchRow],
    errors: list[tuple[str, str]],
    cfg: BenchConfig,
) -> int:
    """Write rows.csv, summary.csv, summary.txt (and errors.csv if needed).

    Floats are serialized with repr, so identical runs produce identical
    bytes. time_s only enters the two CSVs when include_timing_in_csv is
    set; the text summary always shows it. Returns the process exit code:
    2 when any dataset errored, else 0.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with_time = cfg.include_timing_in_csv

    header = list(ROW_FIELDS) + (["time_s"] if with_time else [])
    with open(out / "rows.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            rec = [
                r.dataset, r.model, r.seed, r.fold,
                repr(float(r.r2)), r.n_coef, repr(float(r.theta)),
                "true" if r.converged else "false",
            ]
            if with_time:
                rec.append(repr(float(r.time_s)))
            w.writerow(rec)

    summary = aggregate_report(rows)
    s_fields = [
        "dataset", "model", "r2_mean", "r2_se", "n_coef_mean", "n_coef_se",
        "theta_mean", "theta_se",
    ] + (["time_mean", "time_se"] if with_time else [])
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(s_fields)
        for s in summary:
            rec = [s.dataset, s.model] + [
                repr(float(getattr(s, f))) for f in s_fields[2:]
            ]
            w.writerow(rec)

    (out / "summary.txt").write_text(render_summary_text(summary, cfg))

    if errors:
        with open(out / "errors.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["dataset", "error"])
            w.writerows(errors)
        return 2
    return 0
