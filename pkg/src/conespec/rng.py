"""Seeded, counter-based random streams.

Philox4x64-10 keyed by ``(seed, stream index)`` gives independent
substreams that any implementation of the same algorithm can reproduce.
"""

import numpy as np

ALGORITHM = "philox4x64-10/numpy-generator"

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for substream ``index`` of ``seed`` (both 64-bit unsigned)."""
    seed, index = int(seed), int(index)
    if seed < 0 or index < 0:
        raise ValueError("seed and stream index must be nonnegative")
    key = (seed & _MASK64) | ((index & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))
