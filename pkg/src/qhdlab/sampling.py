"""Counter-based Gaussian draws for the Monte Carlo estimators.

Every block of samples is generated from its own Philox counter, so the
numbers depend only on (seed, stream, block) and never on how blocks are
distributed across workers.
"""
from __future__ import annotations

import os

import numpy as np
from scipy.special import ndtr, ndtri

BLOCK_SIZE = 4096


def default_workers() -> int:
    value = os.environ.get("QHDLAB_WORKERS")
    return max(1, int(value)) if value else 1


def block_uniforms(seed: int, stream: int, block: int, n: int, m: int) -> np.ndarray:
    """Uniforms in (0, 1) of shape (n, m) for one block."""
    bits = np.random.Philox(key=int(seed) & (2**64 - 1), counter=[0, int(stream), int(block), 0])
    u = np.random.Generator(bits).random((n, m))
    return np.clip(u, 1e-300, 1.0 - 2.0**-53)


def block_normals(seed: int, stream: int, block: int, n: int, m: int) -> np.ndarray:
    """Standard normal draws (n, m) via the inverse CDF of counter-based uniforms."""
    return ndtri(block_uniforms(seed, stream, block, n, m))


def truncated_normals(u: np.ndarray, bound: np.ndarray) -> np.ndarray:
    """Map uniforms through the inverse CDF of N(0, 1) truncated to |z| <= bound."""
    lo = ndtr(-bound)
    hi = ndtr(bound)
    return ndtri(lo + u * (hi - lo))


def tree_sum(parts) -> np.ndarray:
    """Pairwise sum in a fixed order (independent of how parts were produced)."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to sum")
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def block_sizes(n_samples: int, block_size: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(int(n_samples), block_size)
    return [block_size] * full + ([rest] if rest else [])
