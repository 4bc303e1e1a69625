"""Full reproduction harness: many seeded runs per size, both update schemes.

For every (d1, s0) cell the two parametrizations are trained from identical
initial hyperplanes, seed by seed, then averaged and compared through the
epoch-speedup construction.  Results land in a bundle that serializes to a
fixed directory layout:

    <out>/d{d1}/s{s0}/   per-run CSVs, avg_w.csv, avg_z.csv, speedup.csv
    <out>/summary.csv    one row per (d1, s0)
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    AveragedCurve,
    SpeedupCurve,
    average_runs,
    epoch_speedup,
    run_variance,
    write_curve_csv,
    write_speedup_csv,
)
from .data import architecture_for, make_autoencoder_dataset
from .mathcore import make_rng
from .train import DivergenceError, RunRecord, TrainConfig, init_params, run_many, write_run_csv

# Best learning rates per size, (z, w), found by grid search.
ETA_TABLE = {
    8: (0.180, 0.45),
    16: (0.110, 0.22),
    32: (0.040, 0.12),
    64: (0.016, 0.07),
    128: (0.010, 0.06),
}

DEFAULT_EPOCHS = 1500
DEFAULT_RUNS = 20
RUNS_D128 = 10


@dataclass(frozen=True)
class ExperimentPlan:
    d1_list: tuple[int, ...]
    runs_per_config: dict[int, int]
    epochs: int
    eta_table: dict[int, tuple[float, float]]
    s0_list: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        for d1 in self.d1_list:
            if d1 < 8 or d1 & (d1 - 1) != 0:
                raise ValueError(f"d1 must be a power of two >= 8, got {d1}")
            eta_z, eta_w = self.eta_table[d1]
            if not (eta_z > 0 and eta_w > 0):
                raise ValueError(f"learning rates must be positive, got {self.eta_table[d1]}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        for s0 in self.s0_list:
            if not s0 > 0:
                raise ValueError(f"s0 must be positive, got {s0}")

    def runs_for(self, d1: int) -> int:
        return self.runs_per_config.get(d1, DEFAULT_RUNS)


def default_plan() -> ExperimentPlan:
    """The headline protocol: five sizes, 1500 epochs, 20 runs (10 at d1=128)."""
    d1_list = (8, 16, 32, 64, 128)
    return ExperimentPlan(
        d1_list=d1_list,
        runs_per_config={d1: (RUNS_D128 if d1 == 128 else DEFAULT_RUNS) for d1 in d1_list},
        epochs=DEFAULT_EPOCHS,
        eta_table=dict(ETA_TABLE),
        s0_list=(1.0,),
    )


@dataclass
class ConfigResult:
    """All completed runs of one (d1, kind, s0) cell plus their average."""

    records: list[RunRecord]
    averaged: AveragedCurve
    diverged: int
    final_epoch_variance: float | None


@dataclass(frozen=True)
class SummaryRow:
    d1: int
    s0: float
    max_speedup: float
    final_e_w: float
    final_e_z: float


@dataclass
class ResultsBundle:
    plan: ExperimentPlan
    base_seed: int
    results: dict[tuple[int, str, float], ConfigResult]
    speedups: dict[tuple[int, float], SpeedupCurve]
    summary: list[SummaryRow]


def run_experiment(plan: ExperimentPlan, base_seed: int = 0, workers: int = 1) -> ResultsBundle:
    """Execute the plan and aggregate curves, speedups, and the summary table.

    Per seed, one initialization draw is shared by both parametrizations, so
    every w/z pair starts from exactly the same hyperplanes.  Divergent runs
    are dropped from the averages (their count is kept); they abort nothing.
    """
    jobs = []
    keys = []
    for d1 in plan.d1_list:
        arch = architecture_for(d1)
        dataset = make_autoencoder_dataset(d1)
        eta_z, eta_w = plan.eta_table[d1]
        for s0 in plan.s0_list:
            for run in range(plan.runs_for(d1)):
                seed = base_seed + run
                zp, wp = init_params(arch, s0, make_rng(seed))
                jobs.append((TrainConfig(arch, "z", eta_z, plan.epochs, seed, s0), dataset, zp))
                keys.append((d1, "z", s0))
                jobs.append((TrainConfig(arch, "w", eta_w, plan.epochs, seed, s0), dataset, wp))
                keys.append((d1, "w", s0))

    outcomes = run_many(jobs, workers=workers)

    grouped: dict[tuple[int, str, float], list] = {}
    for key, outcome in zip(keys, outcomes):
        grouped.setdefault(key, []).append(outcome)

    results = {}
    for key, outcomes_for_key in grouped.items():
        completed = [o for o in outcomes_for_key if isinstance(o, RunRecord)]
        diverged = len(outcomes_for_key) - len(completed)
        if not completed:
            raise RuntimeError(f"every run diverged for (d1, kind, s0)={key}")
        variance = run_variance(completed, -1) if len(completed) >= 2 else None
        results[key] = ConfigResult(completed, average_runs(completed), diverged, variance)

    speedups = {}
    summary = []
    for d1 in plan.d1_list:
        for s0 in plan.s0_list:
            avg_w = results[(d1, "w", s0)].averaged
            avg_z = results[(d1, "z", s0)].averaged
            curve = epoch_speedup(avg_w, avg_z)
            speedups[(d1, s0)] = curve
            summary.append(
                SummaryRow(d1, s0, curve.max_speedup, float(avg_w.errors[-1]), float(avg_z.errors[-1]))
            )
    return ResultsBundle(plan, base_seed, results, speedups, summary)


def small_s_study(
    d1: int,
    s0_list,
    seeds: int,
    epochs: int = DEFAULT_EPOCHS,
    base_seed: int = 0,
    workers: int = 1,
) -> ResultsBundle:
    """Same protocol restricted to one size, swept over initial scales.

    Learning rates stay at the size's tuned values; per-cell final-epoch
    variances are recorded so the scale's effect on run-to-run spread is
    directly readable from the bundle.
    """
    plan = ExperimentPlan(
        d1_list=(d1,),
        runs_per_config={d1: seeds},
        epochs=epochs,
        eta_table={d1: ETA_TABLE[d1]},
        s0_list=tuple(float(s) for s in s0_list),
    )
    return run_experiment(plan, base_seed=base_seed, workers=workers)


def cell_dir(out_root: str, d1: int, s0: float) -> str:
    return os.path.join(out_root, f"d{d1}", f"s{float(s0)!r}")


def write_bundle(bundle: ResultsBundle, out_root: str) -> None:
    """Serialize the bundle into the documented directory layout."""
    os.makedirs(out_root, exist_ok=True)
    for (d1, kind, s0), result in bundle.results.items():
        directory = cell_dir(out_root, d1, s0)
        os.makedirs(directory, exist_ok=True)
        for record in result.records:
            write_run_csv(record, directory)
        write_curve_csv(result.averaged, os.path.join(directory, f"avg_{kind}.csv"))
    for (d1, s0), curve in bundle.speedups.items():
        write_speedup_csv(curve, os.path.join(cell_dir(out_root, d1, s0), "speedup.csv"))
    with open(os.path.join(out_root, "summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d1", "s0", "max_speedup", "final_E_w", "final_E_z"])
        for row in bundle.summary:
            writer.writerow(
                [
                    row.d1,
                    format(row.s0, ".17g"),
                    format(row.max_speedup, ".17g"),
                    format(row.final_e_w, ".17g"),
                    format(row.final_e_z, ".17g"),
                ]
            )
