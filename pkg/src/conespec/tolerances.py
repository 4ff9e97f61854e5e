"""Tolerance profiles.

Every report records the tolerances it was produced with, so the values
here are part of the reproducibility contract.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

PROFILE_ENV = "CONESPEC_TOLERANCE_PROFILE"


@dataclass(frozen=True)
class Tolerances:
    # numeric core; tol_rank and tol_chain are relative to max(1, ||A||)
    tol_rank: float = 1e-9
    tol_chain: float = 1e-8
    tol_exp: float = 1e-10
    tol_ortho: float = 1e-12
    cluster_radius: float = 1e-7
    # cones; tol_cone is relative to ||x||
    tol_cone: float = 1e-9
    tol_lp: float = 1e-9
    cond_cap: float = 1e8
    arc_margin: float = 1e-10
    arc_grid: int = 10_000
    # dynamics
    coeff_floor: float = 1e-12
    # certification
    tol_pair: float = 1e-8
    tol_dir: float = 1e-10
    gap_tol: float = 1e-7
    probes: int = 256

    def replace(self, **changes) -> "Tolerances":
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT = Tolerances()

STRICT = Tolerances(
    tol_rank=1e-11,
    tol_chain=1e-10,
    tol_cone=1e-11,
    tol_lp=1e-10,
    tol_pair=1e-10,
    gap_tol=1e-9,
    probes=1024,
)

PROFILES = {"default": DEFAULT, "strict": STRICT}


def from_environment() -> Tolerances:
    """Return the profile named by ``CONESPEC_TOLERANCE_PROFILE``."""
    name = os.environ.get(PROFILE_ENV, "default").strip().lower() or "default"
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(
            f"{PROFILE_ENV} must be one of {sorted(PROFILES)}, got {name!r}"
        ) from None
