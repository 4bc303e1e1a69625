"""Analytic gradients for both parametrizations, plus a finite-difference oracle.

These are the true derivatives of the summed squared error, factor 2 from the
square included, so the finite-difference oracle should agree with them up to
a global constant of exactly 1.  The constant convention is identical for both
parametrizations, which keeps the learning-rate semantics of the two update
schemes directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathcore import activation_deriv, make_rng
from .model import (
    Architecture,
    ForwardTrace,
    WParams,
    ZLayer,
    ZParams,
    forward_w,
    forward_z,
    training_error,
)


@dataclass(frozen=True)
class Deltas:
    """Per-node error signals: ``output`` for layer 2, ``hidden`` for layer 1."""

    output: np.ndarray
    hidden: np.ndarray


def _output_delta(trace: ForwardTrace, target: np.ndarray) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    if target.shape != trace.out.shape:
        raise ValueError(f"target has shape {target.shape}, expected {trace.out.shape}")
    return 2.0 * activation_deriv(trace.pre_out) * (trace.out - target)


def deltas_z(params: ZParams, trace: ForwardTrace, target: np.ndarray) -> Deltas:
    """Error signals under the z-param; hidden deltas back-project scale*orient."""
    out = _output_delta(trace, target)
    back = params.layer2.orient.T @ (params.layer2.scale * out)
    return Deltas(out, activation_deriv(trace.pre_hidden) * back)


def deltas_w(params: WParams, trace: ForwardTrace, target: np.ndarray) -> Deltas:
    """Error signals under the w-param; hidden deltas back-project the weights."""
    out = _output_delta(trace, target)
    back = params.layer2[:, 1:].T @ out
    return Deltas(out, activation_deriv(trace.pre_hidden) * back)


def grad_z(params: ZParams, trace: ForwardTrace, target: np.ndarray) -> ZParams:
    """Loss derivatives for every (scale, offset, orientation) entry.

    With a[p] the output delta of node p:
    d/d scale[p]     = (offset[p] + orient[p] . hidden) * a[p]
    d/d offset[p]    = scale[p] * a[p]
    d/d orient[p, q] = scale[p] * hidden[q] * a[p]
    and identically for the hidden layer with its own delta and the input in
    place of ``hidden``.  The trace must come from forward_z on these params.
    """
    d = deltas_z(params, trace, target)
    l1, l2 = params.layer1, params.layer2
    sa2 = l2.scale * d.output
    sa1 = l1.scale * d.hidden
    g2 = ZLayer(
        (l2.offset + l2.orient @ trace.hidden) * d.output,
        sa2,
        sa2[:, None] * trace.hidden[None, :],
    )
    g1 = ZLayer(
        (l1.offset + l1.orient @ trace.x) * d.hidden,
        sa1,
        sa1[:, None] * trace.x[None, :],
    )
    return ZParams(g1, g2)


def grad_w(params: WParams, trace: ForwardTrace, target: np.ndarray) -> WParams:
    """Loss derivatives for every (bias | weights) entry; same convention as grad_z."""
    d = deltas_w(params, trace, target)
    g2 = np.empty_like(params.layer2)
    g2[:, 0] = d.output
    g2[:, 1:] = d.output[:, None] * trace.hidden[None, :]
    g1 = np.empty_like(params.layer1)
    g1[:, 0] = d.hidden
    g1[:, 1:] = d.hidden[:, None] * trace.x[None, :]
    return WParams(g1, g2)


def _loss_w(params: WParams, x: np.ndarray, target: np.ndarray) -> float:
    return training_error(forward_w(params, x), target)


def _loss_z(params: ZParams, x: np.ndarray, target: np.ndarray) -> float:
    return training_error(forward_z(params, x), target)


def finite_diff_grad(
    params: WParams | ZParams, x: np.ndarray, target: np.ndarray, step: float = 1e-5
) -> WParams | ZParams:
    """Central-difference gradient of the true loss, entry by entry.

    Independent of the analytic code paths: every probe reruns the full
    forward pass.  Second-order accurate in ``step``.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if isinstance(params, WParams):
        work = params.copy()
        arrays = [work.layer1, work.layer2]
        loss = lambda: _loss_w(work, x, target)
    elif isinstance(params, ZParams):
        work = params.copy()
        arrays = [
            work.layer1.scale, work.layer1.offset, work.layer1.orient,
            work.layer2.scale, work.layer2.offset, work.layer2.orient,
        ]
        loss = lambda: _loss_z(work, x, target)
    else:
        raise TypeError(f"unsupported parameter container {type(params).__name__}")

    grads = []
    for arr in arrays:
        g = np.empty_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            e_plus = loss()
            flat[i] = orig - step
            e_minus = loss()
            flat[i] = orig
            gflat[i] = (e_plus - e_minus) / (2.0 * step)
        grads.append(g)

    if isinstance(params, WParams):
        return WParams(grads[0], grads[1])
    return ZParams(ZLayer(grads[0], grads[1], grads[2]), ZLayer(grads[3], grads[4], grads[5]))


def flatten_params(params: WParams | ZParams) -> np.ndarray:
    """Every parameter (or gradient) entry as one flat vector, in a fixed order."""
    if isinstance(params, WParams):
        return np.concatenate([params.layer1.ravel(), params.layer2.ravel()])
    return np.concatenate(
        [
            part.ravel()
            for layer in (params.layer1, params.layer2)
            for part in (layer.scale, layer.offset, layer.orient)
        ]
    )


def random_point(arch: Architecture, param_kind: str, rng) -> tuple:
    """Random (params, input, target) triple for gradient validation."""
    if param_kind == "w":
        params = WParams(
            rng.standard_normal((arch.d2, arch.d1 + 1)),
            rng.standard_normal((arch.d3, arch.d2 + 1)),
        )
    else:
        params = ZParams(
            ZLayer(rng.standard_normal(arch.d2), rng.standard_normal(arch.d2),
                   rng.standard_normal((arch.d2, arch.d1))),
            ZLayer(rng.standard_normal(arch.d3), rng.standard_normal(arch.d3),
                   rng.standard_normal((arch.d3, arch.d2))),
        )
    x = rng.standard_normal(arch.d1)
    target = rng.uniform(-0.9, 0.9, arch.d3)
    return params, x, target


def gradient_check(
    arch: Architecture,
    param_kind: str,
    seed: int,
    trials: int = 10,
    step: float = 1e-5,
) -> tuple[float, float]:
    """Compare analytic and finite-difference gradients at random points.

    Returns ``(constant, max_rel_error)``: the single proportionality constant
    between the two (fitted as the median entry ratio, expected to be 1), and
    the worst max-norm relative discrepancy after applying it, i.e.
    max |fd - c*analytic| / max(max|c*analytic|, max|fd|, 1e-8) per trial.
    """
    rng = make_rng(seed)
    forward = forward_w if param_kind == "w" else forward_z
    grad = grad_w if param_kind == "w" else grad_z
    pairs = []
    for _ in range(trials):
        params, x, target = random_point(arch, param_kind, rng)
        analytic = flatten_params(grad(params, forward(params, x), target))
        numeric = flatten_params(finite_diff_grad(params, x, target, step))
        pairs.append((analytic, numeric))

    significant = np.concatenate([a[np.abs(a) > 1e-6] for a, _ in pairs])
    ratios = np.concatenate(
        [n[np.abs(a) > 1e-6] / a[np.abs(a) > 1e-6] for a, n in pairs]
    )
    constant = float(np.median(ratios)) if significant.size else 1.0

    worst = 0.0
    for analytic, numeric in pairs:
        scaled = constant * analytic
        denom = max(np.max(np.abs(scaled)), np.max(np.abs(numeric)), 1e-8)
        worst = max(worst, float(np.max(np.abs(numeric - scaled)) / denom))
    return constant, worst
