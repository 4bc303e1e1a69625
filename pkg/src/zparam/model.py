"""Parameter containers, forward propagation, training error, and the w<->z mapping.

Two equivalent ways to parametrize the hyperplane attached to each node:

* w-param: a bias plus a weight per input, ``h = w0 + w . x``.
* z-param: the overall scale pulled out, ``h = scale * (offset + orient . x)``,
  where ``offset`` is the signed distance of the hyperplane from the origin and
  ``orient`` its orientation (unit norm at initialization; training may drift it).

Both layers of the 3-layer network carry one hyperplane per node.  The mapping
between the forms is exact wherever the weight part is nonzero:
``scale = ||w'||, offset = w0/||w'||, orient = w'/||w'||`` with ``w'`` the
weights without the bias.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .mathcore import activation


class DegenerateHyperplaneError(ValueError):
    """Raised by w_to_z when a node's weight row (bias excluded) has zero norm."""


@dataclass(frozen=True)
class Architecture:
    """Node counts of the three layers."""

    d1: int
    d2: int
    d3: int

    def __post_init__(self):
        for name in ("d1", "d2", "d3"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass
class WParams:
    """Traditional parametrization: one (bias | weights) row per node.

    ``layer1`` has shape (d2, d1+1) and ``layer2`` shape (d3, d2+1); column 0
    is the bias.
    """

    layer1: np.ndarray
    layer2: np.ndarray

    @property
    def architecture(self) -> Architecture:
        return Architecture(self.layer1.shape[1] - 1, self.layer1.shape[0], self.layer2.shape[0])

    def copy(self) -> "WParams":
        return WParams(self.layer1.copy(), self.layer2.copy())


@dataclass
class ZLayer:
    """Scale/offset/orientation parameters for one layer.

    ``scale`` and ``offset`` have one entry per node; ``orient`` is one row per
    node, each of the layer's fan-in length.
    """

    scale: np.ndarray
    offset: np.ndarray
    orient: np.ndarray

    def copy(self) -> "ZLayer":
        return ZLayer(self.scale.copy(), self.offset.copy(), self.orient.copy())


@dataclass
class ZParams:
    layer1: ZLayer
    layer2: ZLayer

    @property
    def architecture(self) -> Architecture:
        return Architecture(
            self.layer1.orient.shape[1], self.layer1.orient.shape[0], self.layer2.orient.shape[0]
        )

    def copy(self) -> "ZParams":
        return ZParams(self.layer1.copy(), self.layer2.copy())


@dataclass(frozen=True)
class ForwardTrace:
    """Every intermediate of one forward pass, kept around for backprop.

    ``x`` is the input, ``pre_hidden``/``pre_out`` the pre-activation sums of
    the two trainable layers, ``hidden``/``out`` their activations.
    """

    x: np.ndarray
    pre_hidden: np.ndarray
    hidden: np.ndarray
    pre_out: np.ndarray
    out: np.ndarray


def _check_input(x: np.ndarray, d1: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d1,):
        raise ValueError(f"input has shape {x.shape}, expected ({d1},)")
    return x


def forward_w(params: WParams, x: np.ndarray) -> ForwardTrace:
    """Forward pass under the w-param: h = bias + weights . activations."""
    x = _check_input(x, params.layer1.shape[1] - 1)
    if params.layer2.shape[1] != params.layer1.shape[0] + 1:
        raise ValueError("layer2 fan-in does not match layer1 node count")
    h1 = params.layer1[:, 0] + params.layer1[:, 1:] @ x
    n2 = activation(h1)
    h2 = params.layer2[:, 0] + params.layer2[:, 1:] @ n2
    return ForwardTrace(x, h1, n2, h2, activation(h2))


def forward_z(params: ZParams, x: np.ndarray) -> ForwardTrace:
    """Forward pass under the z-param: h = scale * (offset + orient . activations)."""
    l1, l2 = params.layer1, params.layer2
    x = _check_input(x, l1.orient.shape[1])
    if l2.orient.shape[1] != l1.orient.shape[0]:
        raise ValueError("layer2 fan-in does not match layer1 node count")
    h1 = l1.scale * (l1.offset + l1.orient @ x)
    n2 = activation(h1)
    h2 = l2.scale * (l2.offset + l2.orient @ n2)
    return ForwardTrace(x, h1, n2, h2, activation(h2))


def training_error(trace: ForwardTrace, target: np.ndarray) -> float:
    """Squared reconstruction error of one pattern, summed over output nodes."""
    target = np.asarray(target, dtype=float)
    if target.shape != trace.out.shape:
        raise ValueError(f"target has shape {target.shape}, expected {trace.out.shape}")
    diff = trace.out - target
    return float(diff @ diff)


def _w_rows_to_z(rows: np.ndarray, which: str) -> ZLayer:
    norms = np.linalg.norm(rows[:, 1:], axis=1)
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise DegenerateHyperplaneError(
            f"{which} node {bad} has a zero-norm weight row; its hyperplane is undefined"
        )
    return ZLayer(norms, rows[:, 0] / norms, rows[:, 1:] / norms[:, None])


def w_to_z(params: WParams) -> ZParams:
    """Exact re-expression of w rows as (scale, offset, orientation) triples."""
    return ZParams(_w_rows_to_z(params.layer1, "layer1"), _w_rows_to_z(params.layer2, "layer2"))


def _z_layer_to_w(layer: ZLayer) -> np.ndarray:
    rows = np.empty((layer.orient.shape[0], layer.orient.shape[1] + 1))
    rows[:, 0] = layer.scale * layer.offset
    rows[:, 1:] = layer.scale[:, None] * layer.orient
    return rows


def z_to_w(params: ZParams) -> WParams:
    """Inverse mapping; total (zero scale collapses to an all-zero w row)."""
    return WParams(_z_layer_to_w(params.layer1), _z_layer_to_w(params.layer2))


def dump_params_csv(params: WParams | ZParams, path) -> None:
    """Flat CSV snapshot of every parameter entry, one row per scalar."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["layer", "node", "param", "index", "value"])
        if isinstance(params, WParams):
            layers = [(1, params.layer1), (2, params.layer2)]
            for layer_no, rows in layers:
                for node in range(rows.shape[0]):
                    writer.writerow([layer_no, node, "bias", 0, format(rows[node, 0], ".17g")])
                    for idx in range(rows.shape[1] - 1):
                        writer.writerow(
                            [layer_no, node, "weight", idx, format(rows[node, idx + 1], ".17g")]
                        )
        else:
            for layer_no, layer in [(1, params.layer1), (2, params.layer2)]:
                for node in range(layer.orient.shape[0]):
                    writer.writerow([layer_no, node, "scale", 0, format(layer.scale[node], ".17g")])
                    writer.writerow([layer_no, node, "offset", 0, format(layer.offset[node], ".17g")])
                    for idx in range(layer.orient.shape[1]):
                        writer.writerow(
                            [layer_no, node, "orient", idx, format(layer.orient[node, idx], ".17g")]
                        )
