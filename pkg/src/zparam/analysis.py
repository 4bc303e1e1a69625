"""Curve averaging, smoothing, and the epoch-speedup construction.

The speedup between two averaged learning curves is read off level by level:
for an error level E reached by both curves, it is the ratio of epochs the
slower curve needed over the faster one.  Levels are taken across the window
of errors attained by both curves and reported against "percent toward 0",
where 0 marks the top of the window and 100 its lowest (best) error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AveragedCurve:
    """Per-epoch mean training error across a set of runs."""

    errors: np.ndarray
    run_count: int

    def __post_init__(self):
        object.__setattr__(self, "errors", np.asarray(self.errors, dtype=float))
        if self.errors.ndim != 1 or self.errors.size == 0:
            raise ValueError("errors must be a nonempty 1-D array")


@dataclass(frozen=True)
class SpeedupCurve:
    percent_toward_zero: np.ndarray
    speedup: np.ndarray
    max_speedup: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "percent_toward_zero", np.asarray(self.percent_toward_zero, dtype=float))
        object.__setattr__(self, "speedup", np.asarray(self.speedup, dtype=float))
        if self.percent_toward_zero.size == 0:
            raise ValueError("speedup curve has no points")
        object.__setattr__(self, "max_speedup", float(np.max(self.speedup)))


def average_runs(records) -> AveragedCurve:
    """Element-wise mean of the per-epoch error curves of several runs."""
    if not records:
        raise ValueError("no records to average")
    lengths = {len(r.errors) for r in records}
    if len(lengths) != 1:
        raise ValueError(f"records disagree on epoch count: {sorted(lengths)}")
    stack = np.stack([np.asarray(r.errors, dtype=float) for r in records])
    return AveragedCurve(stack.mean(axis=0), len(records))


def monotone_envelope(curve: AveragedCurve) -> AveragedCurve:
    """Running minimum, making "epochs needed to reach E" well defined."""
    return AveragedCurve(np.minimum.accumulate(curve.errors), curve.run_count)


def moving_average(curve: AveragedCurve, window: int) -> AveragedCurve:
    """Centered moving-average smoothing (window truncated at the edges).

    Purely cosmetic alternative to the envelope; not used by the speedup
    computation.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    errs = curve.errors
    out = np.empty_like(errs)
    half = window // 2
    for i in range(errs.size):
        lo = max(0, i - half)
        hi = min(errs.size, i + half + 1)
        out[i] = errs[lo:hi].mean()
    return AveragedCurve(out, curve.run_count)


def epochs_to_reach(curve: AveragedCurve, level: float) -> float:
    """First (fractional) epoch at which a non-increasing curve falls to ``level``.

    Linear interpolation between the bracketing epochs gives a real-valued
    crossing; exact hits at epoch 0 return 0.
    """
    errs = curve.errors
    if np.any(np.diff(errs) > 0):
        raise ValueError("curve must be non-increasing; apply monotone_envelope first")
    if level > errs[0]:
        raise ValueError(f"level {level} above the curve start {errs[0]}")
    if level < errs[-1]:
        raise ValueError(f"level {level} below the curve minimum {errs[-1]}")
    idx = int(np.argmax(errs <= level))
    if idx == 0:
        return 0.0
    prev, cur = errs[idx - 1], errs[idx]
    return idx - 1 + (prev - level) / (prev - cur)


def epoch_speedup(curve_w: AveragedCurve, curve_z: AveragedCurve, n_levels: int = 200) -> SpeedupCurve:
    """Ratio of epochs needed by ``curve_w`` over ``curve_z`` across shared levels.

    Both curves are enveloped first.  The level window runs from the smaller
    of the two starting errors down to the larger of the two minima; levels
    where either curve's crossing epoch is 0 are skipped, since the ratio is
    undefined there.
    """
    if n_levels < 2:
        raise ValueError(f"n_levels must be >= 2, got {n_levels}")
    env_w = monotone_envelope(curve_w)
    env_z = monotone_envelope(curve_z)
    window_high = min(env_w.errors[0], env_z.errors[0])
    window_low = max(env_w.errors[-1], env_z.errors[-1])
    if not window_low < window_high:
        raise ValueError(
            f"attained error ranges do not overlap (window [{window_low}, {window_high}])"
        )
    percents = []
    ratios = []
    for level in np.linspace(window_high, window_low, n_levels):
        t_w = epochs_to_reach(env_w, level)
        t_z = epochs_to_reach(env_z, level)
        if t_w == 0.0 or t_z == 0.0:
            continue
        percents.append(100.0 * (window_high - level) / (window_high - window_low))
        ratios.append(t_w / t_z)
    if not percents:
        raise ValueError("no level in the window yields a defined speedup")
    return SpeedupCurve(np.array(percents), np.array(ratios))


def run_variance(records, epoch: int) -> float:
    """Sample variance (n-1 denominator) of the error across runs at one epoch."""
    if len(records) < 2:
        raise ValueError(f"need at least 2 records, got {len(records)}")
    values = np.array([r.errors[epoch] for r in records], dtype=float)
    return float(values.var(ddof=1))


def write_curve_csv(curve: AveragedCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_error"])
        for epoch, err in enumerate(curve.errors):
            writer.writerow([epoch, format(err, ".17g")])


def read_curve_csv(path, run_count: int = 0) -> AveragedCurve:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["epoch", "mean_error"]:
            raise ValueError(f"unexpected header {header} in {path}")
        errors = [float(row[1]) for row in reader]
    return AveragedCurve(np.array(errors), run_count)


def write_speedup_csv(curve: SpeedupCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["percent_toward_zero", "speedup"])
        for pct, sp in zip(curve.percent_toward_zero, curve.speedup):
            writer.writerow([format(pct, ".17g"), format(sp, ".17g")])


def read_speedup_csv(path) -> SpeedupCurve:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["percent_toward_zero", "speedup"]:
            raise ValueError(f"unexpected header {header} in {path}")
        rows = [(float(r[0]), float(r[1])) for r in reader]
    return SpeedupCurve(np.array([r[0] for r in rows]), np.array([r[1] for r in rows]))
