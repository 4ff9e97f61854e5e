"""Deterministic random instances."""

from __future__ import annotations

import numpy as np

from .cones import Complexified, Orthant, Transformed
from .errors import UnknownFamily
from .positivity import complexify
from .rng import stream
from .serialize import Instance

FAMILIES = ("positive", "strictly-positive", "complexified", "jordan", "transformed", "reducible")
MAX_N = 128

# substream per family so that different families never share draws
_STREAM = {name: k + 1 for k, name in enumerate(FAMILIES)}


def strictly_positive(rng, n: int) -> np.ndarray:
    return rng.uniform(0.1, 1.0, size=(n, n))


def well_conditioned(rng, n: int, spread: float = 0.4) -> np.ndarray:
    """``I + E`` with ``||E||_2 = spread``; cond is at most (1+spread)/(1-spread)."""
    E = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return np.eye(n) + spread * E / np.linalg.norm(E, 2)


def generate(family: str, n: int, seed: int) -> Instance:
    if family not in FAMILIES:
        raise UnknownFamily(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    n, seed = int(n), int(seed)
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be between 1 and {MAX_N}")
    rng = stream(seed, _STREAM[family])
    meta = {"family": family, "n": n}
    if family == "positive":
        B = rng.uniform(0.0, 1.0, size=(n, n)) * (rng.random((n, n)) < 0.5)
        return Instance(complexify(B), Orthant(n), seed, None, meta)
    if family == "strictly-positive":
        return Instance(complexify(strictly_positive(rng, n)), Orthant(n), seed, None, meta)
    if family == "complexified":
        return Instance(complexify(strictly_positive(rng, n)), Complexified(Orthant(n)), seed, None, meta)
    if family == "jordan":
        if n < 2:
            raise ValueError("the jordan family needs n >= 2")
        # eigenvalue 2 with one chain of rank 2, the rest simple and smaller
        d = np.r_[2.0, 2.0, np.sort(rng.uniform(0.1, 1.5, size=n - 2))[::-1]]
        B = np.diag(d)
        B[0, 1] = 1.0
        return Instance(complexify(B), Orthant(n), seed, None, meta)
    if family == "transformed":
        B = strictly_positive(rng, n)
        T = well_conditioned(rng, n)
        A = T @ complexify(B) @ np.linalg.inv(T)
        return Instance(A, Transformed(T, Complexified(Orthant(n))), seed, None, meta)
    # reducible: two strictly positive diagonal blocks, the second one weaker
    if n < 2:
        raise ValueError("the reducible family needs n >= 2")
    k = n // 2
    B = np.zeros((n, n))
    B[:k, :k] = strictly_positive(rng, k) + 0.5
    B[k:, k:] = 0.5 * strictly_positive(rng, n - k)
    return Instance(complexify(B), Complexified(Orthant(n)), seed, None, meta)
