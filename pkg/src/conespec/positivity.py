"""Positivity, rotational strong positivity and the interior-mapping obstruction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cones import Complexified, Cone, Orthant, Polyhedral, Transformed, arc_feasible
from .errors import NotInCone, NotSolid, RepresentationMissing
from .linalg import as_matrix, as_vector, eigen_spectrum, SubspaceBasis
from .rng import stream
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "InteriorMappingResult",
    "PositivityCertificate",
    "Witness",
    "certify_positive",
    "certify_rotational_strong_positivity",
    "check_interior_mapping",
    "complexify",
    "cone_samples",
    "decomplexify",
    "rotational_strong_positivity_at",
    "strongly_positive_real",
]

CERTIFIED, VIOLATED, UNDECIDED = "Certified", "Violated", "Undecided"
GENERATOR_EXACT, PROBE_SAMPLED, THEOREM_BACKED = "GeneratorExact", "ProbeSampled", "TheoremBacked"


@dataclass(frozen=True, eq=False)
class Witness:
    x: np.ndarray
    image: np.ndarray
    reason: str


@dataclass(frozen=True, eq=False)
class PositivityCertificate:
    verdict: str
    method: str
    probes_used: int = 0
    witnesses: tuple = ()

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    @property
    def violated(self) -> bool:
        return self.verdict == VIOLATED


def complexify(B) -> np.ndarray:
    """The complex extension ``x + iy -> Bx + iBy`` of a real matrix."""
    B = np.asarray(B)
    if np.iscomplexobj(B):
        if np.any(B.imag != 0):
            raise ValueError("complexify expects a real matrix")
        B = B.real
    return as_matrix(B.astype(float))


def decomplexify(A, tol: float = 0.0) -> np.ndarray:
    """Inverse of :func:`complexify`; ``tol`` is relative to ``max|A|``."""
    A = as_matrix(A)
    scale = float(np.max(np.abs(A)))
    if np.max(np.abs(A.imag)) > tol * scale:
        raise ValueError("matrix is not the complexification of a real matrix")
    return A.real.copy()


def _reason(K: Cone, y: np.ndarray) -> str:
    if K.has_facets:
        F, kind = K.facets()
        v = F @ y
        bad = np.minimum(v.real, v.imag) if kind == "quarter" else v.real - np.abs(v.imag)
        k = int(np.argmin(bad))
        return f"facet {k} evaluates to {complex(v[k]):.6g}"
    return "image is not a nonnegative combination of the generators"


def certify_positive(A, K: Cone, tolerances: Tolerances = DEFAULT, probes: Optional[int] = None,
                     seed: int = 0) -> PositivityCertificate:
    """Decide ``A K ⊂ K``.

    With generators the check is exact: every generator must map into the
    cone (at 10x the membership tolerance).  For the complexified cone this
    amounts to ``B g ∈ P`` and ``C g = 0`` for ``A = B + iC``.  Cones
    without generators are probed by sampling, which can refute but never
    certify.
    """
    A = as_matrix(A)
    if A.shape[0] != K.dim:
        raise ValueError("operator and cone disagree on the dimension")
    tol = 10 * tolerances.tol_cone
    if K.has_generators:
        G = K.generators()
        witnesses = []
        for j in range(G.shape[1]):
            y = A @ G[:, j]
            if K.violation(y) > tol:
                witnesses.append(Witness(G[:, j], y, _reason(K, y)))
        verdict = VIOLATED if witnesses else CERTIFIED
        return PositivityCertificate(verdict, GENERATOR_EXACT, G.shape[1], tuple(witnesses))
    count = tolerances.probes if probes is None else probes
    X = cone_samples(K, count, seed)
    witnesses = []
    for x in X.T:
        y = A @ x
        if K.violation(y) > tol:
            witnesses.append(Witness(x, y, _reason(K, y)))
    verdict = VIOLATED if witnesses else UNDECIDED
    return PositivityCertificate(verdict, PROBE_SAMPLED, X.shape[1], tuple(witnesses))


def cone_samples(K: Cone, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic points of ``K`` (columns).

    From generators: the generators, pairwise sums, then random conic
    combinations.  From facets only: vertices of the slice where the facet
    values sum to one, found with random objectives, then random convex
    combinations of those.
    """
    rng = stream(seed, 0)
    if K.has_generators:
        G = K.generators()
    else:
        G = _slice_vertices(K, max(2 * K.dim, 8), rng)
    k = G.shape[1]
    cols = [G[:, j] for j in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            cols.append(G[:, a] + G[:, b])
    while len(cols) < count:
        lam = rng.exponential(size=k) * (rng.random(k) < 0.6)
        if not lam.any():
            lam[rng.integers(k)] = 1.0
        cols.append(G @ lam)
    return np.column_stack(cols[:count]) if count < len(cols) else np.column_stack(cols)


def _slice_vertices(K: Cone, count: int, rng) -> np.ndarray:
    import scipy.optimize

    F, kind = K.facets()
    m, n = F.shape
    re_rows = np.hstack([F.real, -F.imag])
    im_rows = np.hstack([F.imag, F.real])
    if kind == "quarter":
        A_ub = -np.vstack([re_rows, im_rows])
        A_eq = np.atleast_2d(np.sum(re_rows, 0) + np.sum(im_rows, 0))
        b_eq = [1.0]
    else:
        A_ub = -re_rows
        A_eq = np.vstack([im_rows, np.sum(re_rows, 0)])
        b_eq = np.r_[np.zeros(m), 1.0]
    found = []
    for _ in range(count):
        res = scipy.optimize.linprog(
            rng.normal(size=2 * n), A_ub=A_ub, b_ub=np.zeros(A_ub.shape[0]),
            A_eq=A_eq, b_eq=b_eq, bounds=[(None, None)] * (2 * n), method="highs",
        )
        if res.status == 0:
            v = res.x[:n] + 1j * res.x[n:]
            if not any(np.linalg.norm(v - u) < 1e-9 for u in found):
                found.append(v)
    if not found:
        raise RepresentationMissing("could not sample the cone")
    return np.column_stack(found)


def rotational_strong_positivity_at(A, K: Cone, x, tolerances: Tolerances = DEFAULT) -> Optional[complex]:
    """A unit ``z`` with ``z A x`` interior to ``K``, or None if no phase works."""
    A = as_matrix(A)
    x = as_vector(x, K.dim)
    if not np.any(x) or not K.member(x, 10 * tolerances.tol_cone):
        raise NotInCone("point is not a nonzero member of the cone")
    if not K.solid:
        raise NotSolid("rotational strong positivity needs a solid cone")
    y = A @ x
    if not np.any(y):
        return None
    F, kind = K.facets()
    v = F @ y
    if kind == "ray":
        k = int(np.argmax(np.abs(v)))
        z = complex(abs(v[k]) / v[k])
    else:
        z = arc_feasible(v).witness(tolerances.arc_margin)
        if z is None:
            return None
    return z if K.interior_member(z * y, 0.0) else None


def _unwrap_complexified(K: Cone):
    """``(T, P)`` with ``K = T (P + iP)``; T is None for a plain complexified cone."""
    if isinstance(K, Complexified):
        return None, K.base
    if isinstance(K, Transformed) and isinstance(K.base, Complexified):
        return K.T, K.base.base
    return None, None


def strongly_positive_real(B: np.ndarray, P: Cone, margin: float = DEFAULT.tol_cone) -> bool:
    """Does the real matrix ``B`` map every generator of ``P`` into ``int P``?"""
    if not (P.has_generators and P.has_facets and P.solid):
        return False
    G = P.real_generators()
    return all(P.interior_member(B @ G[:, j], margin) for j in range(G.shape[1]))


def certify_rotational_strong_positivity(A, K: Cone, tolerances: Tolerances = DEFAULT,
                                         probes: Optional[int] = None,
                                         seed: int = 0) -> PositivityCertificate:
    """Certify, refute or fail to decide rotational strong positivity on ``K``.

    Exact when ``K = T (P + iP)`` and ``T^-1 A T`` is the complexification
    of a real ``B`` mapping ``P \\ {0}`` into ``int P``: the facet values of
    ``B(p + iq)`` then all have arguments in one closed quarter turn, never
    both endpoints at once, so an open common phase exists.  Otherwise a
    probe campaign runs and can only refute.
    """
    A = as_matrix(A)
    if not K.solid:
        raise NotSolid("rotational strong positivity needs a solid cone")
    T, P = _unwrap_complexified(K)
    if P is not None:
        Ab = A if T is None else np.linalg.solve(T, A @ T)
        scale = float(np.max(np.abs(Ab))) or 1.0
        if np.max(np.abs(Ab.imag)) <= tolerances.tol_cone * scale:
            if strongly_positive_real(Ab.real, P, tolerances.tol_cone):
                return PositivityCertificate(CERTIFIED, THEOREM_BACKED, 0, ())
    count = tolerances.probes if probes is None else probes
    X = cone_samples(K, count, seed)
    witnesses = []
    for x in X.T:
        if rotational_strong_positivity_at(A, K, x, tolerances) is None:
            witnesses.append(Witness(x, A @ x, "no phase rotates the image into the interior"))
    verdict = VIOLATED if witnesses else UNDECIDED
    return PositivityCertificate(verdict, PROBE_SAMPLED, X.shape[1], tuple(witnesses))


@dataclass(frozen=True, eq=False)
class InteriorMappingResult:
    """Outcome of probing whether ``A`` maps ``K \\ {0}`` into ``int K``."""

    holds: bool
    probes_used: int
    witness: Optional[np.ndarray] = None
    image: Optional[np.ndarray] = None
    obstruction: Optional[np.ndarray] = None
    consistent: bool = True
    notes: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.holds


def _probe_points(K: Cone, count: int, seed: int) -> list:
    G = K.generators()
    _, P = _unwrap_complexified(K)
    if P is not None:
        e = np.sum(P.real_generators(), axis=1).astype(np.complex128)
        if isinstance(K, Transformed):
            e = K.T @ e
    else:
        e = np.sum(G, axis=1)
    pts = []
    if K.member(1j * e):
        pts.append(1j * e)
    pts.extend(G[:, j] for j in range(G.shape[1]))
    pts.append(e)
    extra = cone_samples(K, count, seed)
    pts.extend(extra.T)
    return pts[: max(count, 1)]


def _positive_eigen_direction(A: np.ndarray, K: Cone, tolerances: Tolerances):
    """A nonzero point of ``K`` that ``A`` scales by a positive real, if one exists."""
    from .cones import cone_meets_subspace

    spec = eigen_spectrum(A, tolerances=tolerances)
    for c in spec.clusters:
        mu = c.eigenvalue
        if abs(mu) == 0 or abs(mu.imag) > 1e-7 * abs(mu) or mu.real <= 0:
            continue
        E = SubspaceBasis.span(c.eigenvectors(), A.shape[0])
        w = cone_meets_subspace(K, E)
        if w is not None:
            return w
    return None


def check_interior_mapping(A, K: Cone, probes: Optional[int] = None, seed: int = 0,
                           tolerances: Tolerances = DEFAULT) -> InteriorMappingResult:
    """Probe ``A (K \\ {0}) ⊂ int K``.

    Probes come in a fixed order: ``i e`` when it lies in the cone (``e``
    the sum of the base generators), the generators, ``e``, then random
    conic combinations.  For complexified cones an eigenvector in ``K`` of
    a positive eigenvalue refutes the inclusion outright: rotating it to the
    end of its closed phase arc puts it, and its image, on the boundary.
    """
    A = as_matrix(A)
    if not K.solid:
        raise NotSolid("the interior mapping check needs a solid cone")
    count = tolerances.probes if probes is None else probes
    pts = _probe_points(K, count, seed)
    witness = image = None
    used = 0
    for x in pts:
        used += 1
        y = A @ x
        if not K.interior_member(y, tolerances.tol_cone):
            witness, image = x, y
            break
    holds = witness is None
    obstruction = None
    consistent = True
    notes = []
    _, kind = K.facets()
    if kind == "quarter":
        xi = _positive_eigen_direction(A, K, tolerances)
        if xi is not None:
            F, _ = K.facets()
            z = arc_feasible(F @ xi, closed=True).witness()
            obstruction = xi if z is None else z * xi
            notes.append("positive eigenvalue with an eigenvector in the cone")
            if holds:
                consistent = False
                holds = False
                witness, image = obstruction, A @ obstruction
    return InteriorMappingResult(holds, used, witness, image, obstruction, consistent, tuple(notes))
