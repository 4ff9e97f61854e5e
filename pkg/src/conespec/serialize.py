"""Instance and report encoding.

Complex numbers are ``[re, im]`` pairs.  Canonical JSON uses sorted keys,
Python's shortest round-trip float repr and LF line endings, so equal
inputs give equal bytes and equal digests.
"""

from __future__ import annotations

import hashlib
import json
import math
import numbers
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cones import Complexified, Cone, Generated, Orthant, Polyhedral, Transformed
from .errors import ConeSpecError, DimensionMismatch
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "Instance",
    "InstanceError",
    "canonical_dumps",
    "cone_from_json",
    "cone_to_json",
    "digest",
    "dump_instance",
    "jsonable",
    "load_instance",
    "matrix_from_json",
    "matrix_to_json",
    "parse_instance",
    "vector_from_json",
]


class InstanceError(ConeSpecError, ValueError):
    """Malformed instance data; ``line``/``column`` are set for JSON syntax errors."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.line = line
        self.column = column


def _num(v) -> float:
    f = float(v)
    if not math.isfinite(f):
        raise ValueError("non-finite number cannot be serialized")
    return f


def jsonable(obj):
    """Plain JSON data from numpy scalars/arrays, complex numbers and dataclass-like dicts."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return _num(obj)
    if isinstance(obj, numbers.Complex):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.ndim else jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj, indent: Optional[int] = None) -> str:
    text = json.dumps(jsonable(obj), sort_keys=True, allow_nan=False, indent=indent,
                      separators=(",", ":") if indent is None else (",", ": "),
                      ensure_ascii=True)
    return text + "\n"


def digest(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode("ascii")).hexdigest()


# ---------------------------------------------------------------------------
# matrices and vectors


def matrix_to_json(A) -> list:
    A = np.asarray(A, dtype=np.complex128)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in A]


def _complex_entry(e, where: str) -> complex:
    if isinstance(e, bool) or not isinstance(e, list) or len(e) != 2 or not all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in e
    ):
        raise InstanceError(f"{where}: complex entries must be [re, im] number pairs")
    z = complex(float(e[0]), float(e[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InstanceError(f"{where}: non-finite entry")
    return z


def matrix_from_json(data, where: str = "matrix", square: bool = True) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise InstanceError(f"{where}: expected a non-empty list of rows")
    ncol = len(data[0])
    if ncol == 0 or any(len(r) != ncol for r in data):
        raise InstanceError(f"{where}: rows must be non-empty and of equal length")
    if square and len(data) != ncol:
        raise InstanceError(f"{where}: matrix must be square, got {len(data)}x{ncol}")
    return np.array([[_complex_entry(e, where) for e in row] for row in data], dtype=np.complex128)


def vector_from_json(data, where: str = "vector") -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise InstanceError(f"{where}: expected a non-empty list")
    return np.array([_complex_entry(e, where) for e in data], dtype=np.complex128)


def _real_rows(data, where: str) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise InstanceError(f"{where}: expected a non-empty list of real vectors")
    width = len(data[0])
    for r in data:
        if len(r) != width or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in r
        ):
            raise InstanceError(f"{where}: vectors must be equal-length lists of numbers")
    return np.array(data, dtype=float)


# ---------------------------------------------------------------------------
# cones


def cone_to_json(K: Cone) -> dict:
    if isinstance(K, Orthant):
        return {"type": "orthant", "dim": int(K.dim)}
    if isinstance(K, Polyhedral):
        out = {"type": "polyhedral"}
        if K.G is not None:
            out["generators"] = [[_num(v) for v in g] for g in K.G.T]
        if K.H is not None:
            out["facets"] = [[_num(v) for v in h] for h in K.H]
        return out
    if isinstance(K, Complexified):
        return {"type": "complexified", "base": cone_to_json(K.base)}
    if isinstance(K, Transformed):
        return {"type": "transformed", "T": matrix_to_json(K.T), "base": cone_to_json(K.base)}
    if isinstance(K, Generated):
        return {"type": "generated", "generators": matrix_to_json(K.G.T)}
    raise TypeError(f"{type(K).__name__} has no JSON form")


_CONE_KEYS = {
    "orthant": {"type", "dim"},
    "polyhedral": {"type", "generators", "facets"},
    "complexified": {"type", "base"},
    "transformed": {"type", "T", "base"},
    "generated": {"type", "generators"},
}


def cone_from_json(data, where: str = "cone") -> Cone:
    if not isinstance(data, dict) or "type" not in data:
        raise InstanceError(f"{where}: expected an object with a 'type' key")
    kind = data["type"]
    if kind not in _CONE_KEYS:
        raise InstanceError(f"{where}: unknown cone type {kind!r}")
    extra = set(data) - _CONE_KEYS[kind]
    if extra:
        raise InstanceError(f"{where}: unknown keys {sorted(extra)}")
    try:
        if kind == "orthant":
            n = data.get("dim")
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise InstanceError(f"{where}: 'dim' must be a positive integer")
            return Orthant(n)
        if kind == "polyhedral":
            G = _real_rows(data["generators"], f"{where}.generators").T if "generators" in data else None
            H = _real_rows(data["facets"], f"{where}.facets") if "facets" in data else None
            return Polyhedral(G, H)
        if kind == "complexified":
            return Complexified(cone_from_json(data.get("base"), f"{where}.base"))
        if kind == "transformed":
            T = matrix_from_json(data.get("T"), f"{where}.T")
            return Transformed(T, cone_from_json(data.get("base"), f"{where}.base"))
        G = matrix_from_json(data.get("generators"), f"{where}.generators", square=False)
        return Generated(G.T)
    except InstanceError:
        raise
    except (ConeSpecError, ValueError) as exc:
        raise InstanceError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True, eq=False)
class Instance:
    matrix: np.ndarray
    cone: Cone
    seed: Optional[int] = None
    tolerances: Optional[dict] = None
    meta: dict = field(default_factory=dict)

    def tolerance_profile(self, base: Tolerances = DEFAULT) -> Tolerances:
        return base.replace(**self.tolerances) if self.tolerances else base

    def to_json(self) -> dict:
        out = {"matrix": matrix_to_json(self.matrix), "cone": cone_to_json(self.cone)}
        if self.seed is not None:
            out["seed"] = int(self.seed)
        if self.tolerances:
            out["tolerances"] = {k: self.tolerances[k] for k in sorted(self.tolerances)}
        if self.meta:
            out["meta"] = self.meta
        return out

    @property
    def digest(self) -> str:
        return digest(self.to_json())


_INSTANCE_KEYS = {"matrix", "cone", "seed", "tolerances", "meta"}


def parse_instance(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    extra = set(data) - _INSTANCE_KEYS
    if extra:
        raise InstanceError(f"unknown keys {sorted(extra)}")
    for key in ("matrix", "cone"):
        if key not in data:
            raise InstanceError(f"missing key {key!r}")
    A = matrix_from_json(data["matrix"])
    K = cone_from_json(data["cone"])
    if K.dim != A.shape[0]:
        raise InstanceError(f"cone dimension {K.dim} does not match matrix size {A.shape[0]}")
    seed = data.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
        raise InstanceError("'seed' must be a nonnegative integer")
    tol = data.get("tolerances")
    if tol is not None:
        if not isinstance(tol, dict):
            raise InstanceError("'tolerances' must be an object")
        try:
            DEFAULT.replace(**tol)
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"tolerances: {exc}") from exc
    meta = data.get("meta") or {}
    if not isinstance(meta, dict):
        raise InstanceError("'meta' must be an object")
    return Instance(A, K, seed, tol, meta)


def load_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    return parse_instance(data)


def dump_instance(inst: Instance) -> str:
    return canonical_dumps(inst.to_json(), indent=None)
