"""Synthetic autoencoder datasets: one (-1,1)-encoded one-hot pattern per input node.

Pattern i marks position i "on" (+1) and everything else "off" (-1).  The
network sees a mean-shifted copy of each pattern, so the input cloud is
centered and every hyperplane through the origin intersects it; the targets
are the raw +-1 patterns the output layer must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Architecture


@dataclass(frozen=True)
class Dataset:
    """patterns: network inputs, shape (d1, d1); targets: same-shape outputs."""

    patterns: np.ndarray
    targets: np.ndarray
    d1: int


def make_autoencoder_dataset(d1: int) -> Dataset:
    """Build the d1-pattern autoencoding task.

    Raw pattern i is +1 at position i and -1 elsewhere.  Inputs are the raw
    patterns shifted about their per-component mean (a 2/d1 - 1 offset), so
    the input columns average to exactly 0; targets stay unshifted.
    """
    if d1 < 2:
        raise ValueError(f"d1 must be >= 2, got {d1}")
    raw = 2.0 * np.eye(d1) - 1.0
    shifted = raw - raw.mean(axis=0)
    return Dataset(shifted, raw, d1)


def architecture_for(d1: int) -> Architecture:
    """Layer sizes (d1, log2(d1), d1) of the compression family."""
    if d1 < 4 or d1 & (d1 - 1) != 0:
        raise ValueError(f"d1 must be a power of two >= 4, got {d1}")
    return Architecture(d1, d1.bit_length() - 1, d1)
