"""Single and ensemble runs: simulate, write files, compute verdicts."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .config import config_to_mapping
from .diagnostics import (
    FitError,
    energy_residual,
    fit_decay,
    h_decay_bound,
    k1_rate,
    v_monotone,
    w21_budget,
)
from .integrator import RunResult, SimConfig, path_seed, run
from .io import plot_decay_svg, sha256_file, write_jumps, write_kv, write_series_csv
from .spectral import dealias_grid, write_snapshot

__all__ = ["verdicts", "write_run", "run_single", "run_ensemble"]

log = logging.getLogger(__name__)


def verdicts(result: RunResult, check: bool = False) -> dict[str, Any]:
    """Fitted rate and energy residual; with ``check`` also the pathwise bounds."""
    s = result.series
    cfg = result.config
    V0 = result.V0sq
    res = energy_residual(s)
    out: dict[str, Any] = {
        "energy_residual": res,
        "energy_residual_rel": res / V0 if V0 > 0 else 0.0,
        "k1": k1_rate(V0, cfg.C1),
        "k0_sufficient": k1_rate(V0, cfg.C1) / 4.0,
        "s2": result.s2,
        "n_jumps": int(s.n_jumps[-1]),
        "n_steps": result.n_steps,
        "dt": result.dt,
    }
    try:
        fit = fit_decay(s, cfg.tail_fraction, cfg.C1)
        out.update(k0_hat=fit.k0_hat, k0_r2=fit.r2, k0_window=list(fit.window))
    except FitError as exc:
        out["k0_hat"] = f"unavailable ({exc})"
    if check:
        hb = h_decay_bound(s, V0, cfg.C1)
        vm = v_monotone(s)
        out["h_decay_bound"] = hb.passed
        if not hb.passed:
            out["h_decay_bound.first_violation"] = hb.first_violation
        out["v_monotone"] = vm.passed
        if not vm.passed:
            out["v_monotone.first_violation"] = vm.first_violation
        if s.has_l1:
            wb = w21_budget(s, V0)
            out.update({"w21_budget": wb.passed, "w21_budget.lhs": wb.lhs, "w21_budget.rhs": wb.rhs})
    return out


def _config_items(cfg: SimConfig) -> list[tuple[str, Any]]:
    return [(f"config.{k}", v) for k, v in config_to_mapping(cfg).items()]


def write_run(
    result: RunResult,
    out_dir: str | Path,
    name: str,
    emit_svg: bool = False,
    check: bool = False,
) -> tuple[list[Path], dict[str, Any]]:
    """Write every file for one trajectory; the manifest comes last and lists the others."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / f"{name}.csv", out / f"{name}.jumps"]
    write_series_csv(files[0], result.series)
    write_jumps(files[1], result.jumps)
    M = dealias_grid(result.config.n_modes)
    for i, (t, u) in enumerate(result.snapshots):
        p = out / f"{name}_snap{i:04d}.txt"
        write_snapshot(p, u, t, M)
        files.append(p)
    v = verdicts(result, check)
    if emit_svg:
        p = out / f"{name}.svg"
        plot_decay_svg(p, result.series, v["k1"], title=name)
        files.append(p)
    report = out / f"{name}.report"
    write_kv(report, [("run", name), ("version", __version__), ("seed", int(result.config.seed))]
             + sorted(v.items()) + _config_items(result.config))
    files.append(report)
    manifest = out / f"{name}.manifest"
    items: list[tuple[str, Any]] = [("run", name), ("version", __version__), ("seed", int(result.config.seed))]
    items += _config_items(result.config)
    items += [(f"verdict.{k}", val) for k, val in sorted(v.items())]
    items += [(f"file.{p.name}", f"sha256:{sha256_file(p)}") for p in files]
    write_kv(manifest, items)
    files.append(manifest)
    return files, v


def _prepare(config: SimConfig, check: bool) -> SimConfig:
    # the W2,1 budget needs L1 norms on every row
    return replace(config, record_l1=True) if check and not config.record_l1 else config


def run_single(
    config: SimConfig,
    out_dir: str | Path,
    name: str = "run",
    emit_svg: bool = False,
    check: bool = False,
) -> list[Path]:
    cfg = _prepare(config, check)
    result = run(cfg)
    files, _ = write_run(result, out_dir, name, emit_svg, check)
    return files


def _member(args) -> tuple[int, int, dict[str, Any], list[Path]]:
    cfg, out_dir, name, p, emit_svg, check = args
    result = run(cfg)
    files, v = write_run(result, out_dir, f"{name}_p{p:04d}", emit_svg, check)
    return p, int(cfg.seed), v, files


def _summary(values: list[float]) -> tuple[float, float, float]:
    a = np.asarray(values, dtype=float)
    return float(a.min()), float(a.mean()), float(a.max())


def run_ensemble(
    config: SimConfig,
    n_paths: int,
    out_dir: str | Path,
    name: str = "run",
    workers: int = 1,
    emit_svg: bool = False,
    check: bool = False,
) -> list[Path]:
    """Run ``n_paths`` independent paths seeded from ``config.seed`` and aggregate."""
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    cfg = _prepare(config, check)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    jobs = [
        (cfg.with_seed(path_seed(cfg.seed, p)), str(out_dir), name, p, emit_svg, check)
        for p in range(n_paths)
    ]
    if workers <= 1:
        results = [_member(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_member, jobs))
    # join barrier passed; aggregate in path order
    results.sort(key=lambda r: r[0])

    out = Path(out_dir)
    agg: list[tuple[str, Any]] = [
        ("run", name),
        ("version", __version__),
        ("seed", int(cfg.seed)),
        ("n_paths", n_paths),
    ]
    agg += _config_items(cfg)
    vs = [r[2] for r in results]
    agg.append(("path_seeds", [r[1] for r in results]))
    agg.append(("s2", vs[0]["s2"]))
    for key in ("energy_residual", "energy_residual_rel", "k1"):
        agg.append((f"{key}.min_mean_max", list(_summary([v[key] for v in vs]))))
    rates = [v["k0_hat"] for v in vs if isinstance(v["k0_hat"], float)]
    agg.append(("k0_hat.fitted", f"{len(rates)}/{n_paths}"))
    if rates:
        agg.append(("k0_hat.min_mean_max", list(_summary(rates))))
        agg.append(("k0_hat.positive", f"{sum(r > 0 for r in rates)}/{n_paths}"))
    if check:
        for key in ("h_decay_bound", "v_monotone", "w21_budget"):
            passes = sum(bool(v.get(key, False)) for v in vs)
            agg.append((f"{key}.passes", f"{passes}/{n_paths}"))

    report = out / f"{name}.report"
    write_kv(report, agg)
    files = [f for r in results for f in r[3]] + [report]
    manifest = out / f"{name}.manifest"
    write_kv(manifest, agg + [(f"file.{p.name}", f"sha256:{sha256_file(p)}") for p in files])
    log.info("ensemble %s: %d paths written to %s", name, n_paths, out)
    return files + [manifest]
