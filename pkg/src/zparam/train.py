"""Initialization, the online-update training loop, and the learning-rate grid search.

Every run is pinned by its config: the seed fixes the initial orientations,
patterns are visited in index order, and updates are applied per pattern
(classic online descent), so two runs with equal configs produce identical
records.  A full-batch switch exists for sensitivity checks only.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .grad import grad_w, grad_z
from .mathcore import make_rng, random_unit_vector
from .model import Architecture, WParams, ZLayer, ZParams, forward_w, forward_z, training_error, z_to_w

PARAM_KINDS = ("w", "z")


@dataclass(frozen=True)
class TrainConfig:
    arch: Architecture
    param_kind: str
    eta: float
    epochs: int
    seed: int
    s0: float = 1.0
    full_batch: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "s0", float(self.s0))
        object.__setattr__(self, "epochs", int(self.epochs))
        object.__setattr__(self, "seed", int(self.seed))
        if self.param_kind not in PARAM_KINDS:
            raise ValueError(f"param_kind must be one of {PARAM_KINDS}, got {self.param_kind!r}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.s0 > 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass
class RunRecord:
    """One seeded run: per-epoch mean training error plus the end state."""

    config: TrainConfig
    errors: np.ndarray
    final_params: WParams | ZParams


class DivergenceError(RuntimeError):
    """Training error went non-finite; carries the epoch and the partial record."""

    def __init__(self, epoch: int, record: RunRecord):
        super().__init__(
            f"run diverged at epoch {epoch} "
            f"(kind={record.config.param_kind}, eta={record.config.eta}, seed={record.config.seed})"
        )
        self.epoch = epoch
        self.record = record


def init_params(arch: Architecture, s0: float, rng: np.random.Generator) -> tuple[ZParams, WParams]:
    """Shared starting point for both update schemes.

    Every node gets scale s0, offset 0 and a fresh random unit orientation
    (layer-1 nodes drawn first, in index order).  The returned WParams is the
    exact w-image of the returned ZParams, so both parametrizations start on
    identical hyperplanes.
    """
    if not s0 > 0:
        raise ValueError(f"s0 must be positive, got {s0}")
    layers = []
    for nodes, fan_in in ((arch.d2, arch.d1), (arch.d3, arch.d2)):
        orient = np.stack([random_unit_vector(fan_in, rng) for _ in range(nodes)])
        layers.append(ZLayer(np.full(nodes, float(s0)), np.zeros(nodes), orient))
    zp = ZParams(layers[0], layers[1])
    return zp, z_to_w(zp)


def _resolve_initial(config: TrainConfig, initial: WParams | ZParams | None) -> WParams | ZParams:
    if initial is None:
        zp, wp = init_params(config.arch, config.s0, make_rng(config.seed))
        return zp if config.param_kind == "z" else wp
    want = ZParams if config.param_kind == "z" else WParams
    if not isinstance(initial, want):
        raise TypeError(f"initial params are {type(initial).__name__}, config wants {want.__name__}")
    return initial.copy()


def train_run(config: TrainConfig, dataset: Dataset, initial: WParams | ZParams | None = None) -> RunRecord:
    """One seeded descent; returns the per-epoch mean-over-patterns error curve.

    The recorded error of each epoch comes from that epoch's own forward
    passes, evaluated just before each pattern's update.  ``initial`` lets a
    caller supply the starting parameters (e.g. to share one draw between the
    two parametrizations); otherwise they derive from config.seed.
    """
    if dataset.d1 != config.arch.d1:
        raise ValueError(f"dataset d1={dataset.d1} does not match architecture d1={config.arch.d1}")
    params = _resolve_initial(config, initial)
    forward, gradient = (forward_z, grad_z) if config.param_kind == "z" else (forward_w, grad_w)
    eta = config.eta
    errors = np.zeros(config.epochs)
    n_patterns = dataset.d1

    for epoch in range(config.epochs):
        total = 0.0
        batch_acc = None
        for i in range(n_patterns):
            trace = forward(params, dataset.patterns[i])
            total += training_error(trace, dataset.targets[i])
            g = gradient(params, trace, dataset.targets[i])
            if config.full_batch:
                batch_acc = g if batch_acc is None else _add_params(batch_acc, g)
            else:
                _apply_update(params, g, eta)
        if config.full_batch:
            _apply_update(params, batch_acc, eta)
        errors[epoch] = total / n_patterns
        if not math.isfinite(errors[epoch]):
            partial = RunRecord(config, errors[: epoch + 1].copy(), params)
            raise DivergenceError(epoch, partial)
    return RunRecord(config, errors, params)


def _apply_update(params: WParams | ZParams, grads, eta: float) -> None:
    if isinstance(params, WParams):
        params.layer1 -= eta * grads.layer1
        params.layer2 -= eta * grads.layer2
    else:
        for layer, g in ((params.layer1, grads.layer1), (params.layer2, grads.layer2)):
            layer.scale -= eta * g.scale
            layer.offset -= eta * g.offset
            layer.orient -= eta * g.orient


def _add_params(a, b):
    if isinstance(a, WParams):
        return WParams(a.layer1 + b.layer1, a.layer2 + b.layer2)
    return ZParams(
        ZLayer(a.layer1.scale + b.layer1.scale, a.layer1.offset + b.layer1.offset,
               a.layer1.orient + b.layer1.orient),
        ZLayer(a.layer2.scale + b.layer2.scale, a.layer2.offset + b.layer2.offset,
               a.layer2.orient + b.layer2.orient),
    )


def _final_error_or_inf(config: TrainConfig, dataset: Dataset) -> float:
    try:
        return float(train_run(config, dataset).errors[-1])
    except DivergenceError:
        return math.inf


def default_eta_grid() -> np.ndarray:
    """Log grid, 13 points per decade, spanning [1e-3, 1.0]."""
    return np.geomspace(1e-3, 1.0, 40)


def grid_search_eta(
    arch: Architecture,
    param_kind: str,
    eta_grid,
    runs_per_point: int,
    epochs: int,
    s0: float,
    base_seed: int,
    dataset: Dataset | None = None,
    workers: int = 1,
) -> tuple[float, list[tuple[float, float]]]:
    """Pick the learning rate whose mean final error over seeded runs is lowest.

    Divergent runs count as +inf.  Ties go to the smaller eta.  Returns the
    winner and the full (eta, mean final error) table.
    """
    eta_grid = [float(e) for e in eta_grid]
    if not eta_grid:
        raise ValueError("eta_grid must be nonempty")
    if runs_per_point < 1:
        raise ValueError(f"runs_per_point must be >= 1, got {runs_per_point}")
    if dataset is None:
        from .data import make_autoencoder_dataset

        dataset = make_autoencoder_dataset(arch.d1)
    configs = [
        TrainConfig(arch, param_kind, eta, epochs, base_seed + run, s0)
        for eta in eta_grid
        for run in range(runs_per_point)
    ]
    finals = run_many(
        [(cfg, dataset, None) for cfg in configs], workers=workers, reduce=_final_error_or_inf
    )
    table = []
    for i, eta in enumerate(eta_grid):
        chunk = finals[i * runs_per_point : (i + 1) * runs_per_point]
        table.append((eta, float(np.mean(chunk))))
    best_eta, best_mean = min(table, key=lambda t: (t[1], t[0]))
    if math.isinf(best_mean):
        raise RuntimeError("every grid point diverged; no usable eta found")
    return best_eta, table


def _run_job(job):
    config, dataset, initial, reduce = job
    if reduce is not None:
        return reduce(config, dataset)
    try:
        return train_run(config, dataset, initial)
    except DivergenceError as exc:
        return exc


def run_many(jobs, workers: int = 1, reduce=None) -> list:
    """Execute (config, dataset, initial) jobs, optionally across processes.

    Results come back in job order regardless of scheduling, so callers see
    identical output for any worker count.  A diverged run yields its
    DivergenceError as the result instead of raising.  ``reduce`` maps
    (config, dataset) to a cheap summary inside the worker, avoiding shipping
    whole records back.
    """
    tagged = [(cfg, ds, init, reduce) for cfg, ds, init in jobs]
    if workers <= 1 or len(tagged) <= 1:
        return [_run_job(j) for j in tagged]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, tagged, chunksize=max(1, len(tagged) // (4 * workers))))


def run_csv_name(config: TrainConfig) -> str:
    return (
        f"{config.param_kind}_d{config.arch.d1}_eta{config.eta!r}"
        f"_s{config.s0!r}_seed{config.seed}.csv"
    )


def write_run_csv(record: RunRecord, directory) -> str:
    """Per-epoch error curve as ``epoch,error`` rows; returns the file path."""
    path = os.path.join(directory, run_csv_name(record.config))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "error"])
        for epoch, err in enumerate(record.errors):
            writer.writerow([epoch, format(err, ".17g")])
    return path


def read_run_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["epoch", "error"]:
            raise ValueError(f"unexpected header {header} in {path}")
        return np.array([float(row[1]) for row in reader])
