"""Experiment runner: config files, seeded Monte-Carlo method comparisons,
convergence traces, timing benchmarks, CSV/JSON outputs.

A run spec is a flat key-value YAML file; every key has a desk-scale
default, unknown keys are rejected, and CLI flags override file values.
Outputs per run: results.csv (one row per method/element-count/trial),
trace_<method>_<M>_<trial>.csv per iterative run, and summary.json with
per-method mean/std rates. The bench command writes bench.csv with
median per-iteration core times.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .bdris import (
    ChannelSet,
    InapplicableMethodError,
    RateObjective,
    Scenario,
    gen_channels,
    low_cost_bdris,
    mo_u_proj_baseline,
    rate_bits,
)
from .manifold import u_random, us_random
from .optimizer import IterationTrace, OptimizerConfig, optimize_us

LN2 = math.log(2.0)

METHODS = ("mo_us", "mo_u_proj", "low_cost")
ITERATIVE_METHODS = ("mo_us", "mo_u_proj")

RESULTS_HEADER = ["method", "M", "trial", "seed", "rate_bits", "iterations",
                  "wall_ms", "converged"]
TRACE_HEADER = ["k", "F_bits", "wall_ms"]
BENCH_HEADER = ["method", "M", "median_iter_ms", "total_ms"]

CONFIG_DEFAULTS: dict = {
    "nt": 4,
    "nr": 4,
    "tx_pos": [0.0, 0.0, 1.5],
    "rx_pos": [50.0, 0.0, 1.5],
    "ris_pos": [50.0, 3.0, 3.0],
    "k_rician": 3.0,
    "alpha_ris": 2.0,
    "alpha_direct": 3.75,
    "rho_db": 130.0,
    "pl0_db": 50.0,
    "direct_blocked": False,
    "sweep": [16, 32, 64, 128],
    "trials": 50,
    "seed0": 0,
    "methods": ["mo_us", "mo_u_proj", "low_cost"],
    "epsilon": 1e-3,
    "max_iters": 100,
    "sweeps_per_iter": 1,
    "fallback_grid": 360,
    "output_dir": "results",
}


@dataclass(frozen=True)
class RunSpec:
    """Validated description of one experiment: scenario, element-count
    sweep, trial count, base seed, method list, optimizer settings, and
    the output directory."""

    scenario: Scenario
    sweep: tuple[int, ...]
    trials: int
    seed0: int
    methods: tuple[str, ...]
    optimizer: OptimizerConfig
    output_dir: str

    def __post_init__(self):
        if not self.sweep:
            raise ValueError("sweep must list at least one element count")
        if any((not isinstance(m, int)) or m < 1 for m in self.sweep):
            raise ValueError("sweep entries must be integers >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seed0 < 0:
            raise ValueError("seed0 must be >= 0")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {list(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must not repeat")


def _expect_int(raw: dict, key: str) -> int:
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"config key {key!r} must be an integer, got {v!r}")
    return v


def _expect_number(raw: dict, key: str) -> float:
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"config key {key!r} must be a number, got {v!r}")
    return float(v)


def _expect_position(raw: dict, key: str) -> tuple[float, float, float]:
    v = raw[key]
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ValueError(f"config key {key!r} must be a 3-entry coordinate list")
    return tuple(float(x) for x in v)


def build_run_spec(values: dict) -> RunSpec:
    """RunSpec from a flat key-value mapping; every key optional, unknown
    keys rejected. rho is given in dB (rho_db) and converted to linear."""
    unknown = sorted(set(values) - set(CONFIG_DEFAULTS))
    if unknown:
        raise ValueError(
            f"unknown config keys {unknown}; allowed keys: {sorted(CONFIG_DEFAULTS)}")
    raw = {**CONFIG_DEFAULTS, **values}

    sweep = raw["sweep"]
    if isinstance(sweep, int) and not isinstance(sweep, bool):
        sweep = [sweep]
    if not isinstance(sweep, (list, tuple)):
        raise ValueError("config key 'sweep' must be a list of element counts")
    methods = raw["methods"]
    if isinstance(methods, str):
        methods = [s.strip() for s in methods.split(",") if s.strip()]
    if not isinstance(methods, (list, tuple)):
        raise ValueError("config key 'methods' must be a list of method names")
    if not isinstance(raw["direct_blocked"], bool):
        raise ValueError("config key 'direct_blocked' must be a boolean")
    if not isinstance(raw["output_dir"], str):
        raise ValueError("config key 'output_dir' must be a string")

    sweep = tuple(int(m) for m in sweep)
    scenario = Scenario(
        nt=_expect_int(raw, "nt"),
        nr=_expect_int(raw, "nr"),
        m=sweep[0] if sweep else 1,
        tx_pos=_expect_position(raw, "tx_pos"),
        rx_pos=_expect_position(raw, "rx_pos"),
        ris_pos=_expect_position(raw, "ris_pos"),
        k_rician=_expect_number(raw, "k_rician"),
        alpha_ris=_expect_number(raw, "alpha_ris"),
        alpha_direct=_expect_number(raw, "alpha_direct"),
        rho=10.0 ** (_expect_number(raw, "rho_db") / 10.0),
        pl0_db=_expect_number(raw, "pl0_db"),
        direct_blocked=raw["direct_blocked"],
    )
    optimizer = OptimizerConfig(
        epsilon=_expect_number(raw, "epsilon"),
        max_iters=_expect_int(raw, "max_iters"),
        sweeps_per_iter=_expect_int(raw, "sweeps_per_iter"),
        fallback_grid=_expect_int(raw, "fallback_grid"),
    )
    return RunSpec(
        scenario=scenario,
        sweep=sweep,
        trials=_expect_int(raw, "trials"),
        seed0=_expect_int(raw, "seed0"),
        methods=tuple(methods),
        optimizer=optimizer,
        output_dir=raw["output_dir"],
    )


def load_run_spec(path, overrides: dict | None = None) -> RunSpec:
    """RunSpec from a YAML file, with overrides (e.g. CLI flags) applied
    on top of the file values."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a key-value mapping")
    merged = dict(data)
    merged.update(overrides or {})
    return build_run_spec(merged)


@dataclass(frozen=True)
class ResultRow:
    """One (method, element count, trial) outcome. converged is "true",
    "false", or "inapplicable"; inapplicable rows carry nan rate and zero
    iterations."""

    method: str
    M: int
    trial: int
    seed: int
    rate_bits: float
    iterations: int
    wall_ms: float
    converged: str


@dataclass
class ExperimentResult:
    rows: list[ResultRow]
    summary: dict
    results_csv: Path
    summary_json: Path
    output_dir: Path


def _init_seed(seed0: int, trial: int, M: int, stream: int) -> np.random.SeedSequence:
    # independent of the channel seed so starts and channels never collide
    return np.random.SeedSequence((seed0, trial, M, stream))


def _run_method(method: str, ch: ChannelSet, rho: float, seed0: int, trial: int,
                M: int, cfg: OptimizerConfig):
    """Execute one method on one realization. Returns (rate_bits,
    iterations, wall_ms, converged, trace|None); raises
    InapplicableMethodError only out of low_cost on blocked scenarios."""
    t0 = time.perf_counter()
    if method == "mo_us":
        P0 = us_random(M, seed=_init_seed(seed0, trial, M, 0))
        P, trace = optimize_us(RateObjective(ch, rho), P0, cfg)
        wall = (time.perf_counter() - t0) * 1e3
        ok = "true" if trace.status == "converged" else "false"
        return rate_bits(ch, P, rho), trace.iterations, wall, ok, trace
    if method == "mo_u_proj":
        U0 = u_random(M, seed=_init_seed(seed0, trial, M, 1))
        P, trace = mo_u_proj_baseline(ch, rho, U0, cfg)
        wall = (time.perf_counter() - t0) * 1e3
        ok = "true" if trace.status == "converged" else "false"
        return rate_bits(ch, P, rho), trace.iterations, wall, ok, trace
    if method == "low_cost":
        P = low_cost_bdris(ch)
        wall = (time.perf_counter() - t0) * 1e3
        return rate_bits(ch, P, rho), 0, wall, "true", None
    raise ValueError(f"unknown method {method!r}")


def _write_trace(path: Path, trace: IterationTrace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for r in trace.records:
            w.writerow([r.k, repr(r.value / LN2), repr(r.wall_ms)])


def _summarize(rows: list[ResultRow], methods, sweep) -> dict:
    """Per method, per element count: mean/std rate in bits and mean
    iteration count over applicable rows; null when none apply."""
    out: dict = {}
    for method in methods:
        per_m: dict = {}
        for M in sweep:
            got = [r for r in rows
                   if r.method == method and r.M == M and r.converged != "inapplicable"]
            if not got:
                per_m[str(M)] = None
                continue
            rates = np.array([r.rate_bits for r in got])
            iters = np.array([r.iterations for r in got], dtype=float)
            per_m[str(M)] = {
                "mean_rate_bits": float(np.mean(rates)),
                "std_rate_bits": float(np.std(rates)),
                "mean_iters": float(np.mean(iters)),
            }
        out[method] = per_m
    return out


def run_experiment(spec: RunSpec) -> ExperimentResult:
    """Run the full method-by-sweep-by-trial grid and write result files.

    For a fixed (element count, trial) every method sees the identical
    channel realization (seed seed0 + trial), so comparisons are paired.
    Rows are produced in (method, element count, trial) order and the
    whole run is deterministic apart from the timing columns.
    """
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    channels: dict[tuple[int, int], ChannelSet] = {}
    rows: list[ResultRow] = []
    for method in spec.methods:
        for M in spec.sweep:
            sc = spec.scenario.with_elements(M)
            for trial in range(spec.trials):
                key = (M, trial)
                if key not in channels:
                    channels[key] = gen_channels(sc, seed=spec.seed0 + trial)
                ch = channels[key]
                try:
                    rb, iters, wall, ok, trace = _run_method(
                        method, ch, sc.rho, spec.seed0, trial, M, spec.optimizer)
                except InapplicableMethodError:
                    rb, iters, wall, ok, trace = math.nan, 0, 0.0, "inapplicable", None
                rows.append(ResultRow(method=method, M=M, trial=trial,
                                      seed=spec.seed0 + trial, rate_bits=rb,
                                      iterations=iters, wall_ms=wall, converged=ok))
                if trace is not None:
                    _write_trace(out_dir / f"trace_{method}_{M}_{trial}.csv", trace)

    results_csv = out_dir / "results.csv"
    with open(results_csv, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for r in rows:
            w.writerow([r.method, r.M, r.trial, r.seed, repr(r.rate_bits),
                        r.iterations, repr(r.wall_ms), r.converged])

    summary = _summarize(rows, spec.methods, spec.sweep)
    summary_json = out_dir / "summary.json"
    with open(summary_json, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ExperimentResult(rows=rows, summary=summary, results_csv=results_csv,
                            summary_json=summary_json, output_dir=out_dir)


@dataclass
class BenchRow:
    method: str
    M: int
    median_iter_ms: float
    total_ms: float


def bench(spec: RunSpec) -> tuple[list[BenchRow], Path]:
    """Time the iterative methods per element count and write bench.csv.

    For each (method, M) the median per-iteration core time (gradient,
    tangent projection, eigendecomposition-and-frame, point update) is
    taken across at least 5 trials, run sequentially. Non-iterative
    methods have no per-iteration cost and are skipped.
    """
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials = max(5, spec.trials)
    rows: list[BenchRow] = []
    for method in spec.methods:
        if method not in ITERATIVE_METHODS:
            continue
        for M in spec.sweep:
            sc = spec.scenario.with_elements(M)
            core_ms: list[float] = []
            total = 0.0
            for trial in range(trials):
                ch = gen_channels(sc, seed=spec.seed0 + trial)
                t0 = time.perf_counter()
                _, iters, wall, _, trace = _run_method(
                    method, ch, sc.rho, spec.seed0, trial, M, spec.optimizer)
                total += time.perf_counter() - t0
                core_ms.extend(r.core_ms for r in trace.records if r.k >= 1)
            rows.append(BenchRow(method=method, M=M,
                                 median_iter_ms=statistics.median(core_ms),
                                 total_ms=total * 1e3))
    bench_csv = out_dir / "bench.csv"
    with open(bench_csv, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(BENCH_HEADER)
        for r in rows:
            w.writerow([r.method, r.M, repr(r.median_iter_ms), repr(r.total_ms)])
    return rows, bench_csv
