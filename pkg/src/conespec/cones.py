"""Cones in C^n, their membership oracles and the geometry built on them.

Every cone with a facet description exposes it through
:meth:`Cone.facets` as a matrix ``F`` with unit rows and a *kind*:

``"ray"``
    a real cone: ``x`` belongs iff every ``(F x)_k`` is real and ``>= 0``.
``"quarter"``
    a complexified cone ``P + iP``: ``x`` belongs iff every ``(F x)_k`` lies
    in the closed first quadrant.

Rotating ``x`` by ``z`` on the unit circle rotates every facet value by the
same ``z``, which is what turns phase questions into arc intersections.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import scipy.optimize

from .errors import (
    DimensionMismatch,
    InvalidCone,
    NotSolid,
    NumericalFailure,
    ProofMismatch,
    RepresentationMissing,
)
from .linalg import SubspaceBasis, as_matrix, as_vector, spectral_projector_coordinates
from .tolerances import DEFAULT

__all__ = [
    "ArcSet",
    "Complexified",
    "Cone",
    "DecompositionSpec",
    "Generated",
    "Orthant",
    "Polyhedral",
    "ProperVerdict",
    "Restricted",
    "Transformed",
    "arc_feasible",
    "circle_align",
    "cone_meets_subspace",
    "find_proper_subcone",
    "lp_feasible",
    "lp_pointed",
    "projectively_proper",
]

TWO_PI = 2.0 * math.pi
# facet enumeration is exhaustive, keep it to small dimensions
ENUMERATION_MAX_DIM = 4


def _unit_rows(H: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(H, axis=1)
    if np.any(nrm == 0):
        raise InvalidCone("zero facet row")
    return H / nrm[:, None]


def _unit_cols(G: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(G, axis=0)
    if np.any(nrm == 0):
        raise InvalidCone("zero generator")
    return G / nrm[None, :]


def _real_stack(M: np.ndarray) -> np.ndarray:
    """Rows of ``M`` split into real and imaginary parts (for real unknowns)."""
    M = np.asarray(M)
    return np.vstack([M.real, M.imag])


class Cone:
    """Base class.  Subclasses are frozen dataclasses."""

    dim: int

    # -- representations -------------------------------------------------
    def generators(self) -> np.ndarray:
        """Complex generators as columns: the cone is their real conic hull."""
        raise RepresentationMissing(f"{type(self).__name__} has no generator form")

    def facets(self):
        """``(F, kind)`` with unit rows, see the module docstring."""
        raise NotSolid(f"{type(self).__name__} has no facet description")

    @property
    def has_generators(self) -> bool:
        try:
            self.generators()
        except RepresentationMissing:
            return False
        return True

    @property
    def has_facets(self) -> bool:
        try:
            self.facets()
        except NotSolid:
            return False
        return True

    @property
    def solid(self) -> bool:
        return False

    # -- oracles ---------------------------------------------------------
    def violation(self, x) -> float:
        """Relative distance from membership, 0 for members.

        With facets this is the worst facet violation divided by ``||x||``;
        otherwise the relative least-squares residual of a nonnegative
        combination of generators.
        """
        x = as_vector(x, self.dim)
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            return 0.0
        if self.has_facets:
            F, kind = self.facets()
            return _facet_violation(F @ x, kind) / nx
        G = self.generators()
        _, res = scipy.optimize.nnls(_real_stack(G), np.concatenate([x.real, x.imag]))
        return float(res) / nx

    def member(self, x, tol: float = DEFAULT.tol_cone) -> bool:
        return self.violation(x) <= tol

    def interior_member(self, x, margin: float = DEFAULT.tol_cone) -> bool:
        """Strict interior test: every facet value clears ``margin * ||x||``."""
        if not self.solid:
            raise NotSolid(f"{type(self).__name__} is not known to be solid")
        F, kind = self.facets()
        x = as_vector(x, self.dim)
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            return False
        v = F @ x
        bar = margin * nx
        if kind == "quarter":
            return bool(np.all(v.real > bar) and np.all(v.imag > bar))
        return bool(np.all(v.real > bar) and np.all(np.abs(v.imag) <= bar))

    def interior_point(self) -> np.ndarray:
        """A deterministic point of the cone, interior when the cone is solid."""
        return np.sum(self.generators(), axis=1)


def _facet_violation(v: np.ndarray, kind: str) -> float:
    if v.size == 0:
        return 0.0
    if kind == "quarter":
        return float(max(0.0, -np.min(v.real), -np.min(v.imag)))
    return float(max(0.0, -np.min(v.real), np.max(np.abs(v.imag))))


# ---------------------------------------------------------------------------
# concrete cones


@dataclass(frozen=True, eq=False)
class Orthant(Cone):
    """The nonnegative orthant of R^n, sitting inside C^n."""

    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InvalidCone("orthant dimension must be positive")

    def generators(self):
        return np.eye(self.dim, dtype=np.complex128)

    def facets(self):
        return np.eye(self.dim), "ray"

    @property
    def solid(self):
        return True

    def real_generators(self) -> np.ndarray:
        return np.eye(self.dim)


@dataclass(frozen=True, eq=False)
class Polyhedral(Cone):
    """A real polyhedral cone from generators (columns of ``G``), facets (rows of ``H``) or both.

    A missing side is filled in by exhaustive enumeration when the
    dimension is at most 4.
    """

    G: Optional[np.ndarray] = None
    H: Optional[np.ndarray] = None

    def __post_init__(self):
        G = None if self.G is None else np.atleast_2d(np.asarray(self.G, dtype=float))
        H = None if self.H is None else np.atleast_2d(np.asarray(self.H, dtype=float))
        if G is None and H is None:
            raise InvalidCone("a polyhedral cone needs generators or facets")
        if G is not None and H is not None and G.shape[0] != H.shape[1]:
            raise DimensionMismatch("generators and facets disagree on the dimension")
        n = G.shape[0] if G is not None else H.shape[1]
        for M in (G, H):
            if M is not None and not np.all(np.isfinite(M)):
                raise InvalidCone("non-finite cone data")
        Gn = None if G is None else _unit_cols(G)
        Hn = None if H is None else _unit_rows(H)
        if Gn is None and n <= ENUMERATION_MAX_DIM:
            G = Gn = _rays_from_facets(Hn)
        if Hn is None and n <= ENUMERATION_MAX_DIM and np.linalg.matrix_rank(Gn) == n:
            H = Hn = _facets_from_rays(Gn)
        if Gn is not None and Hn is not None:
            worst = float(np.min(Hn @ Gn)) if Gn.size and Hn.size else 0.0
            if worst < -DEFAULT.tol_cone:
                raise InvalidCone(f"a generator violates a facet by {-worst:.3g}")
        for M in (G, H, Gn, Hn):
            if M is not None:
                M.setflags(write=False)
        # the given data are kept verbatim; computations use unit-normalized copies
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "_G", Gn)
        object.__setattr__(self, "_H", Hn)
        object.__setattr__(self, "dim", n)
        if Gn is not None:
            if Gn.shape[1] == 0:
                raise InvalidCone("the cone is trivial")
            if not lp_pointed(Gn):
                raise InvalidCone("cone is not pointed")
        elif np.linalg.matrix_rank(Hn) < n:
            raise InvalidCone("cone is not pointed")

    def generators(self):
        if self._G is None:
            raise RepresentationMissing("polyhedral cone was given by facets only")
        return self._G.astype(np.complex128)

    def real_generators(self) -> np.ndarray:
        if self._G is None:
            raise RepresentationMissing("polyhedral cone was given by facets only")
        return self._G

    def facets(self):
        if self._H is None:
            raise NotSolid("polyhedral cone was given by generators only")
        return self._H, "ray"

    @property
    def solid(self):
        if self._H is None:
            return False
        if self._G is not None:
            return np.linalg.matrix_rank(self._G) == self.dim
        # max s subject to H x >= s, |x_i| <= 1
        n, m = self.dim, self._H.shape[0]
        res = scipy.optimize.linprog(
            np.r_[np.zeros(n), -1.0],
            A_ub=np.hstack([-self._H, np.ones((m, 1))]),
            b_ub=np.zeros(m),
            bounds=[(-1, 1)] * n + [(None, 1)],
            method="highs",
        )
        return bool(res.status == 0 and -res.fun > DEFAULT.tol_lp)

    def interior_point(self):
        if self._G is not None:
            return np.sum(self._G, axis=1).astype(np.complex128)
        n, m = self.dim, self._H.shape[0]
        res = scipy.optimize.linprog(
            np.r_[np.zeros(n), -1.0],
            A_ub=np.hstack([-self._H, np.ones((m, 1))]),
            b_ub=np.zeros(m),
            bounds=[(-1, 1)] * n + [(None, 1)],
            method="highs",
        )
        if res.status != 0:
            raise NumericalFailure(f"interior point LP failed: {res.message}")
        return res.x[:n].astype(np.complex128)


def _null_vector(M: np.ndarray, n: int) -> Optional[np.ndarray]:
    if M.shape[0] == 0:
        return np.ones(1) if n == 1 else None
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
    if n - rank != 1:
        return None
    return Vh[-1]


def _dedupe_unit(vectors: list) -> np.ndarray:
    out: list = []
    for v in vectors:
        v = v / np.linalg.norm(v)
        if not any(np.linalg.norm(v - u) < 1e-9 for u in out):
            out.append(v)
    return np.array(out)


def _facets_from_rays(G: np.ndarray) -> np.ndarray:
    n, k = G.shape
    rows = []
    for combo in itertools.combinations(range(k), n - 1):
        h = _null_vector(G[:, list(combo)].T, n)
        if h is None:
            continue
        vals = h @ G
        if np.all(vals >= -1e-10):
            rows.append(h)
        elif np.all(vals <= 1e-10):
            rows.append(-h)
    if not rows:
        raise InvalidCone("facet enumeration found no facets")
    return _dedupe_unit(rows)


def _rays_from_facets(H: np.ndarray) -> np.ndarray:
    m, n = H.shape
    rays = []
    for combo in itertools.combinations(range(m), n - 1):
        r = _null_vector(H[list(combo)], n)
        if r is None:
            continue
        vals = H @ r
        if np.all(vals >= -1e-10):
            rays.append(r)
        elif np.all(vals <= 1e-10):
            rays.append(-r)
    if not rays:
        raise InvalidCone("ray enumeration found no extreme rays")
    return _dedupe_unit(rays).T


@dataclass(frozen=True, eq=False)
class Complexified(Cone):
    """``P + iP`` for a real cone ``P``; interior is ``int P + i int P``."""

    base: Cone

    def __post_init__(self):
        if isinstance(self.base, (Complexified, Transformed, Generated, Restricted)):
            raise InvalidCone("complexification needs a real base cone")
        object.__setattr__(self, "dim", self.base.dim)

    def generators(self):
        G = self.base.generators()
        return np.hstack([G, 1j * G])

    def real_generators(self) -> np.ndarray:
        return self.base.real_generators()

    def facets(self):
        F, _ = self.base.facets()
        return F, "quarter"

    @property
    def solid(self):
        return self.base.solid

    def interior_point(self):
        p = self.base.interior_point()
        return p + 1j * p


@dataclass(frozen=True, eq=False)
class Transformed(Cone):
    """The image ``T K`` of a cone under an invertible matrix."""

    T: np.ndarray
    base: Cone

    def __post_init__(self):
        T = as_matrix(self.T)
        if T.shape[0] != self.base.dim:
            raise DimensionMismatch("transform and base cone disagree on the dimension")
        cond = float(np.linalg.cond(T))
        if not cond <= DEFAULT.cond_cap:
            raise InvalidCone(f"transform condition number {cond:.3g} exceeds the cap")
        T.setflags(write=False)
        Tinv = np.linalg.inv(T)
        Tinv.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "Tinv", Tinv)
        object.__setattr__(self, "dim", self.base.dim)

    def generators(self):
        return self.T @ self.base.generators()

    def facets(self):
        F, kind = self.base.facets()
        return _unit_rows(F @ self.Tinv), kind

    @property
    def solid(self):
        return self.base.solid

    def violation(self, x):
        x = as_vector(x, self.dim)
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            return 0.0
        y = self.Tinv @ x
        return self.base.violation(y) * float(np.linalg.norm(y)) / nx

    def interior_point(self):
        return self.T @ self.base.interior_point()


@dataclass(frozen=True, eq=False)
class Generated(Cone):
    """Real conic hull of complex generators (columns of ``G``)."""

    G: np.ndarray

    def __post_init__(self):
        G = np.asarray(self.G, dtype=np.complex128)
        if G.ndim != 2 or G.shape[1] == 0:
            raise InvalidCone("generated cone needs at least one generator")
        if not np.all(np.isfinite(G)):
            raise InvalidCone("non-finite generators")
        Gn = _unit_cols(G)
        G.setflags(write=False)
        Gn.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "_G", Gn)
        object.__setattr__(self, "dim", G.shape[0])
        if not lp_pointed(Gn):
            raise InvalidCone("cone is not pointed")

    def generators(self):
        return self._G


@dataclass(frozen=True, eq=False)
class Restricted(Cone):
    """``K`` intersected with a subspace, in the orthonormal coordinates of the subspace.

    Facet rows that vanish on the subspace are dropped, so interior
    queries refer to the interior relative to the subspace.
    """

    base: Cone
    subspace: SubspaceBasis

    def __post_init__(self):
        if self.subspace.ambient_dim != self.base.dim:
            raise DimensionMismatch("subspace and cone disagree on the dimension")
        if self.subspace.dim == 0:
            raise InvalidCone("restriction to the zero subspace")
        object.__setattr__(self, "dim", self.subspace.dim)

    def facets(self):
        F, kind = self.base.facets()
        FQ = F @ self.subspace.basis
        keep = np.linalg.norm(FQ, axis=1) > 1e-12
        return _unit_rows(FQ[keep]), kind

    def violation(self, x):
        x = as_vector(x, self.dim)
        return self.base.violation(self.subspace.embed(x))

    @cached_property
    def _relative_interior(self):
        # one LP per restricted cone; solid and interior_point both need it
        return _relative_interior_point(self) if self.has_facets else None

    @property
    def solid(self):
        return self._relative_interior is not None

    def interior_point(self):
        if self._relative_interior is None:
            raise NotSolid("restricted cone has empty relative interior")
        return self._relative_interior.copy()


def _relative_interior_point(K: Cone) -> Optional[np.ndarray]:
    """Maximize the smallest facet slack over a box; None when it is zero."""
    F, kind = K.facets()
    m, n = F.shape
    # unknowns: real and imaginary parts of x, then s
    Fr = np.hstack([F.real, -F.imag])  # Re(F x)
    Fi = np.hstack([F.imag, F.real])  # Im(F x)
    rows = [-Fr] + ([-Fi] if kind == "quarter" else [])
    A_ub = np.hstack([np.vstack(rows), np.ones((len(rows) * m, 1))])
    A_eq = np.hstack([Fi, np.zeros((m, 1))]) if kind == "ray" else None
    res = scipy.optimize.linprog(
        np.r_[np.zeros(2 * n), -1.0],
        A_ub=A_ub,
        b_ub=np.zeros(A_ub.shape[0]),
        A_eq=A_eq,
        b_eq=None if A_eq is None else np.zeros(m),
        bounds=[(-1, 1)] * (2 * n) + [(None, 1)],
        method="highs",
    )
    if res.status != 0 or -res.fun <= DEFAULT.tol_lp:
        return None
    return res.x[:n] + 1j * res.x[n : 2 * n]


# ---------------------------------------------------------------------------
# circle arcs


@dataclass(frozen=True)
class ArcSet:
    """Disjoint arcs of the unit circle, angles in ``[0, 2 pi)``.

    ``span`` keeps the unsplit arc ``(lo, hi)`` (possibly crossing 0)
    for witness selection; it is None for the empty set.
    """

    arcs: tuple
    closed: bool
    span: Optional[tuple] = None

    @classmethod
    def empty(cls, closed: bool = False) -> "ArcSet":
        return cls((), closed, None)

    @classmethod
    def full(cls, closed: bool = False) -> "ArcSet":
        return cls(((0.0, TWO_PI),), closed, (0.0, TWO_PI))

    @classmethod
    def from_span(cls, lo: float, hi: float, closed: bool) -> "ArcSet":
        if hi - lo >= TWO_PI:
            return cls.full(closed)
        a = lo % TWO_PI
        b = a + (hi - lo)
        if b <= TWO_PI:
            arcs = ((a, b),)
        else:
            arcs = ((0.0, b - TWO_PI), (a, TWO_PI))
        return cls(arcs, closed, (lo, hi))

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.arcs))

    def contains(self, phi: float) -> bool:
        if self.span is None:
            return False
        lo, hi = self.span
        if hi - lo >= TWO_PI:
            return True
        # offset from the start of the unsplit arc, so a crossing of 0 is seamless
        d = (phi - lo) % TWO_PI
        if self.closed:
            return d <= hi - lo or d >= TWO_PI - 1e-15
        return 0.0 < d < hi - lo

    def witness(self, margin: float = DEFAULT.arc_margin) -> Optional[complex]:
        """A unit scalar in the set: the midpoint for open arcs, the start for closed ones."""
        if self.span is None:
            return None
        lo, hi = self.span
        if self.closed:
            phi = lo
        else:
            if hi - lo <= 2 * margin:
                return None
            phi = 0.5 * (lo + hi)
        return complex(math.cos(phi), math.sin(phi))


def arc_feasible(values: Sequence[complex], closed: bool = False) -> ArcSet:
    """Phases ``phi`` with ``exp(i phi) c_k`` in the (open or closed) first quadrant for all k.

    Each constraint is an arc of width pi/2, so the intersection is a
    single arc.  Offsets are unwrapped against the first nonzero value;
    an offset of pi/2 or more already empties the intersection.
    """
    vals = np.asarray(values, dtype=np.complex128).ravel()
    nonzero = vals[vals != 0]
    if not closed and nonzero.size < vals.size:
        return ArcSet.empty(closed)
    if nonzero.size == 0:
        return ArcSet.full(closed)
    starts = -np.angle(nonzero)
    delta = np.angle(np.exp(1j * (starts - starts[0])))
    lo = starts[0] + float(np.max(delta))
    hi = starts[0] + float(np.min(delta)) + 0.5 * math.pi
    if hi < lo or (not closed and hi == lo):
        return ArcSet.empty(closed)
    return ArcSet.from_span(lo, hi, closed)


def _ray_align(values: np.ndarray, closed: bool, tol: float) -> Optional[complex]:
    """Phase making every value real nonnegative (positive when open)."""
    big = float(np.max(np.abs(values))) if values.size else 0.0
    if big == 0.0:
        return None if not closed or values.size == 0 else 1.0 + 0j
    k = int(np.argmax(np.abs(values)))
    z = abs(values[k]) / values[k]
    rot = z * values
    if np.max(np.abs(rot.imag)) > tol * big or np.min(rot.real) < -tol * big:
        return None
    if not closed and np.min(rot.real) <= tol * big:
        return None
    return complex(z)


def circle_align(xi, K: Cone, closed: bool, tol: float = DEFAULT.tol_cone,
                 margin: float = DEFAULT.arc_margin) -> Optional[complex]:
    """A unit ``z`` with ``z xi`` in ``K`` (closed) or in its interior (open), else None."""
    F, kind = K.facets()
    xi = as_vector(xi, K.dim)
    if not np.any(xi):
        raise ValueError("cannot align the zero vector")
    v = F @ xi
    if kind == "ray":
        z = _ray_align(v, closed, tol)
    else:
        if closed:
            # values that are zero up to rounding do not constrain the phase
            v = np.where(np.abs(v) <= tol * np.linalg.norm(xi), 0, v)
        z = arc_feasible(v, closed=closed).witness(margin)
    if z is None:
        return None
    ok = K.member(z * xi, 10 * tol) if closed else K.interior_member(z * xi, 0.0)
    return z if ok else None


# ---------------------------------------------------------------------------
# linear programming


def lp_feasible(A_eq, b_eq, nonneg, normalization, tol: float = DEFAULT.tol_lp):
    """A point of ``{A x = b, x_i >= 0 where flagged, normalization . x = 1}`` or None."""
    A = np.atleast_2d(np.asarray(A_eq, dtype=float))
    b = np.asarray(b_eq, dtype=float).ravel()
    nvar = len(nonneg)
    if A.size == 0:
        A = np.zeros((0, nvar))
    if A.shape[1] != nvar or b.shape[0] != A.shape[0]:
        raise DimensionMismatch("LP data have inconsistent shapes")
    norm_row = np.asarray(normalization, dtype=float).ravel()
    A_full = np.vstack([A, norm_row])
    b_full = np.r_[b, 1.0]
    bounds = [(0, None) if flag else (None, None) for flag in nonneg]
    res = scipy.optimize.linprog(
        np.zeros(nvar), A_eq=A_full, b_eq=b_full, bounds=bounds, method="highs"
    )
    if res.status == 2:
        return None
    if res.status != 0:
        raise NumericalFailure(f"LP solver failed: {res.message}")
    x = res.x
    scale = max(1.0, float(np.max(np.abs(A_full))) * max(1.0, float(np.max(np.abs(x)))))
    if np.max(np.abs(A_full @ x - b_full)) > tol * scale * 10:
        raise NumericalFailure("LP solution does not satisfy the equalities")
    return x


def lp_pointed(G) -> bool:
    """True when the real conic hull of the columns of ``G`` contains no line."""
    G = np.asarray(G, dtype=np.complex128)
    G = G[:, np.linalg.norm(G, axis=0) > 0]
    k = G.shape[1]
    if k == 0:
        return True
    w = lp_feasible(_real_stack(G), np.zeros(2 * G.shape[0]), [True] * k, np.ones(k))
    return w is None


def cone_meets_subspace(K: Cone, M: SubspaceBasis, tol: float = DEFAULT.tol_lp):
    """A unit vector of ``K`` inside ``M``, or None when ``K`` meets ``M`` only at zero."""
    if M.ambient_dim != K.dim:
        raise DimensionMismatch("subspace and cone disagree on the dimension")
    if M.dim == 0:
        return None
    if K.has_generators:
        G = K.generators()
        k = G.shape[1]
        C = M.complement().basis
        if C.shape[1] == 0:
            w = G[:, 0]
        else:
            lam = lp_feasible(
                _real_stack(C.conj().T @ G), np.zeros(2 * C.shape[1]), [True] * k,
                np.ones(k), tol,
            )
            if lam is None:
                return None
            w = G @ lam
    elif K.has_facets:
        w = _meet_by_facets(K, M, tol)
        if w is None:
            return None
    else:
        raise RepresentationMissing("cone has neither generators nor facets")
    nw = np.linalg.norm(w)
    if nw <= tol:
        raise NumericalFailure("cone-subspace witness collapsed to zero")
    w = M.project(w / nw)
    return w / np.linalg.norm(w)


def _meet_by_facets(K: Cone, M: SubspaceBasis, tol: float):
    F, kind = K.facets()
    FQ = F @ M.basis
    m, d = FQ.shape
    re_rows = np.hstack([FQ.real, -FQ.imag])
    im_rows = np.hstack([FQ.imag, FQ.real])
    # unknowns: coordinates (re, im) then nonnegative slacks
    if kind == "quarter":
        vals = np.vstack([re_rows, im_rows])
        A = np.hstack([vals, -np.eye(2 * m)])
        nonneg = [False] * (2 * d) + [True] * (2 * m)
        norm = np.r_[np.zeros(2 * d), np.ones(2 * m)]
    else:
        A = np.vstack([
            np.hstack([re_rows, -np.eye(m)]),
            np.hstack([im_rows, np.zeros((m, m))]),
        ])
        nonneg = [False] * (2 * d) + [True] * m
        norm = np.r_[np.zeros(2 * d), np.ones(m)]
    sol = lp_feasible(A, np.zeros(A.shape[0]), nonneg, norm, tol)
    if sol is None:
        return None
    return M.basis @ (sol[:d] + 1j * sol[d : 2 * d])


# ---------------------------------------------------------------------------
# decompositions and projectively proper subcones


@dataclass(frozen=True, eq=False)
class DecompositionSpec:
    """A direct sum decomposition of C^n."""

    subspaces: tuple

    def __post_init__(self):
        subs = tuple(self.subspaces)
        if not subs:
            raise ValueError("empty decomposition")
        n = subs[0].ambient_dim
        if any(S.ambient_dim != n for S in subs):
            raise DimensionMismatch("subspaces live in different spaces")
        if sum(S.dim for S in subs) != n:
            raise DimensionMismatch("dimensions do not add up to the ambient dimension")
        B = np.hstack([S.basis for S in subs])
        if np.linalg.svd(B, compute_uv=False)[-1] <= DEFAULT.tol_rank:
            raise ValueError("subspaces are not independent")
        object.__setattr__(self, "subspaces", subs)

    @property
    def ambient_dim(self) -> int:
        return self.subspaces[0].ambient_dim

    @classmethod
    def coordinate(cls, n: int, blocks: Sequence[Sequence[int]]) -> "DecompositionSpec":
        I = np.eye(n, dtype=np.complex128)
        return cls(tuple(SubspaceBasis(n, I[:, list(b)]) for b in blocks))


@dataclass(frozen=True)
class ProperVerdict:
    proper: bool
    per_index: tuple

    def __bool__(self):
        return self.proper


def _block_coordinates(subspaces: Sequence[SubspaceBasis], G: np.ndarray) -> list:
    """Coordinates of every generator in each block of the (partial) direct sum."""
    B = np.hstack([S.basis for S in subspaces])
    if B.shape[0] == B.shape[1]:
        C = spectral_projector_coordinates(subspaces) @ G
    else:
        C = np.linalg.lstsq(B, G, rcond=None)[0]
    out, start = [], 0
    for S in subspaces:
        out.append(C[start : start + S.dim])
        start += S.dim
    return out


def _proper_flags(G: np.ndarray, subspaces: Sequence[SubspaceBasis], tol: float) -> tuple:
    flags = []
    gnorm = np.linalg.norm(G, axis=0)
    for coords in _block_coordinates(subspaces, G):
        keep = np.linalg.norm(coords, axis=0) > tol * np.maximum(gnorm, 1.0)
        flags.append(lp_pointed(coords[:, keep]) if np.any(keep) else True)
    return tuple(bool(f) for f in flags)


def projectively_proper(K: Cone, D: DecompositionSpec, tol: float = DEFAULT.tol_cone,
                        indices: Optional[Sequence[int]] = None) -> ProperVerdict:
    """Is every projection of ``K`` along the decomposition pointed?

    With ``indices`` the question is asked inside the partial sum of those
    blocks, which must contain ``K``.
    """
    if D.ambient_dim != K.dim:
        raise DimensionMismatch("decomposition and cone disagree on the dimension")
    subs = D.subspaces if indices is None else [D.subspaces[i] for i in indices]
    G = K.generators()
    if indices is not None:
        B = np.hstack([S.basis for S in subs])
        if G.shape[1] and np.linalg.norm(G - B @ np.linalg.lstsq(B, G, rcond=None)[0]) > 1e-8 * np.linalg.norm(G):
            raise ValueError("cone does not lie in the chosen blocks")
    flags = _proper_flags(G, subs, tol)
    return ProperVerdict(all(flags), flags)


def _intersect_kernel(G: np.ndarray, B: np.ndarray, tol: float) -> np.ndarray:
    """Generators of ``{G lam : lam >= 0, B lam = 0}`` from minimal supports."""
    Br = _real_stack(B)
    k = G.shape[1]
    r = int(np.linalg.matrix_rank(Br, tol=tol * max(1.0, float(np.max(np.abs(Br), initial=0)))))
    rays = []
    for size in range(1, min(k, r + 1) + 1):
        for S in itertools.combinations(range(k), size):
            if any(set(prev).issubset(S) for prev, _ in rays):
                continue
            sub = Br[:, list(S)]
            if sub.shape[0] == 0:
                null = np.eye(size)[:, :1] if size == 1 else None
            else:
                _, s, Vh = np.linalg.svd(sub)
                rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
                null = Vh[rank:].T if size - rank == 1 else None
            if null is None:
                continue
            lam = null[:, 0]
            if np.all(lam < 0):
                lam = -lam
            if np.all(lam > tol):
                rays.append((S, lam))
    cols = []
    for S, lam in rays:
        v = G[:, list(S)] @ lam
        if np.linalg.norm(v) > tol:
            cols.append(v / np.linalg.norm(v))
    if not cols:
        return np.zeros((G.shape[0], 0), dtype=np.complex128)
    return np.column_stack(cols)


def find_proper_subcone(K: Cone, D: DecompositionSpec, tol: float = DEFAULT.tol_cone):
    """Indices ``I`` and ``K0 = K ∩ (sum of X_i, i in I)`` with ``K0`` nontrivial and projectively proper.

    While some projection is improper, the lowest improper index is
    dropped and the cone is cut down to the remaining sum.  An improper
    projection always leaves a nonzero point behind, so an empty cut
    means the numerics went wrong.
    """
    if D.ambient_dim != K.dim:
        raise DimensionMismatch("decomposition and cone disagree on the dimension")
    G = K.generators()
    indices = list(range(len(D.subspaces)))
    while True:
        subs = [D.subspaces[i] for i in indices]
        flags = _proper_flags(G, subs, tol)
        if all(flags) or len(indices) == 1:
            return tuple(indices), Generated(G)
        drop = flags.index(False)
        coords = _block_coordinates(subs, G)[drop]
        G = _intersect_kernel(G, coords, 1e-9)
        if G.shape[1] == 0:
            raise ProofMismatch(
                f"dropping index {indices[drop]} left only the zero vector"
            )
        del indices[drop]
