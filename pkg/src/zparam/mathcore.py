"""Numeric bedrock: the squashing activation, its derivative, and seeded randomness.

All randomness in the project flows through generators built by :func:`make_rng`,
so a 64-bit seed pins down every draw bit-for-bit across runs and platforms.
"""

from __future__ import annotations

import numpy as np

# Pre-normalization norms below this are treated as a degenerate draw and resampled.
_DEGENERATE_NORM = 1e-12


def make_rng(seed: int) -> np.random.Generator:
    """Seeded random generator (PCG64; normals via numpy's ziggurat).

    The same seed always yields the same stream, which is what makes whole
    training runs reproducible.  Each run owns its own generator; they are
    never shared across threads.
    """
    return np.random.Generator(np.random.PCG64(seed))


def activation(h):
    """Squashing nonlinearity 2/(1+exp(-h)) - 1, mapping the reals onto (-1, 1).

    Computed as tanh(h/2), which is the same function but free of overflow
    for any finite input.  Works elementwise on arrays.
    """
    return np.tanh(0.5 * h)


def activation_deriv(h):
    """Slope of :func:`activation`: (1 - activation(h)^2) / 2, in (0, 0.5]."""
    a = np.tanh(0.5 * h)
    return 0.5 * (1.0 - a * a)


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Direction drawn uniformly from the unit hypersphere.

    Each component is sampled from a standard normal and the vector is then
    normalized; unlike normalized uniform-cube samples this carries no bias
    toward the cube corners.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    while True:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm >= _DEGENERATE_NORM:
            return v / norm
