"""Dense complex linear algebra.

Eigenstructure with generalized eigenchains, the semigroup action
``exp(A t) x``, distances to subspaces and spectral splitting.  The heavy
lifting (Hessenberg/QR, ordered Schur forms, Pade scaling-and-squaring) is
delegated to LAPACK through :mod:`scipy.linalg`; the code here clusters
eigenvalues, recovers Jordan chains and keeps the results deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    FlowOverflow,
    NonConvergence,
    NotAnEigenvalue,
    SplitOnSpectrum,
)
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "EigenChain",
    "EigenCluster",
    "SpectralData",
    "SubspaceBasis",
    "as_matrix",
    "as_vector",
    "canonical_phase",
    "distance_to_subspace",
    "eigen_spectrum",
    "flow_apply",
    "flow_apply_normalized",
    "invariant_split",
    "multiplicities",
    "projective_angle",
    "restrict",
]

# log of the largest finite double, with a little headroom
LOG_FLOAT_MAX = 709.0


def as_matrix(A, *, square: bool = True) -> np.ndarray:
    """Return ``A`` as a finite complex128 2-d array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {M.shape}")
    if M.shape[0] == 0 or M.shape[1] == 0:
        raise DimensionMismatch("matrix must be non-empty")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def as_vector(x, n: Optional[int] = None) -> np.ndarray:
    """Return ``x`` as a finite complex128 1-d array, optionally of length ``n``."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` to unit norm with its largest-magnitude entry real positive.

    The first entry attaining the maximal modulus (up to a relative 1e-12
    band, so ties resolve by position rather than by rounding) is used.
    """
    v = np.asarray(v, dtype=np.complex128)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        return v.copy()
    v = v / nrm
    mags = np.abs(v)
    k = int(np.argmax(mags >= mags.max() * (1.0 - 1e-12)))
    return v * (abs(v[k]) / v[k])


def projective_angle(u, v) -> float:
    """Angle between the complex lines spanned by ``u`` and ``v``.

    Computed from the phase-aligned chord length, which stays accurate
    for tiny angles where ``arccos`` would not.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("projective angle of a zero vector")
    u = u / nu
    v = v / nv
    ip = np.vdot(v, u)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    chord = np.linalg.norm(u - phase * v)
    return float(2.0 * math.asin(min(1.0, chord / 2.0)))


def _matrix_scale(A: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(A, 2)))


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """A subspace of C^n held through an orthonormal basis (columns)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=np.complex128)
        if B.ndim != 2 or B.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis must have shape ({self.ambient_dim}, k), got {B.shape}"
            )
        if B.shape[1] > self.ambient_dim:
            raise DimensionMismatch("more basis vectors than the ambient dimension")
        if B.shape[1]:
            gram = B.conj().T @ B
            err = np.max(np.abs(gram - np.eye(B.shape[1])))
            if err > 1e-10:
                raise ValueError(f"basis is not orthonormal (error {err:.2e})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def span(cls, vectors, n: Optional[int] = None, rtol: float = 1e-12):
        """Orthonormal basis of the span of ``vectors`` (columns of a matrix or a list)."""
        if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
            V = vectors.astype(np.complex128)
        else:
            vecs = [as_vector(v) for v in vectors]
            if not vecs:
                if n is None:
                    raise ValueError("ambient dimension needed for an empty span")
                return cls.zero(n)
            V = np.column_stack(vecs)
        if n is not None and V.shape[0] != n:
            raise DimensionMismatch(f"vectors have length {V.shape[0]}, expected {n}")
        if V.shape[1] == 0:
            return cls.zero(V.shape[0])
        U, s, _ = np.linalg.svd(V, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return cls.zero(V.shape[0])
        r = int(np.sum(s > rtol * s[0]))
        return cls(V.shape[0], U[:, :r])

    @classmethod
    def zero(cls, n: int) -> "SubspaceBasis":
        return cls(n, np.zeros((n, 0), dtype=np.complex128))

    @classmethod
    def whole(cls, n: int) -> "SubspaceBasis":
        return cls(n, np.eye(n, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.ambient_dim)
        Q = self.basis
        return Q @ (Q.conj().T @ x)

    def complement(self) -> "SubspaceBasis":
        """Orthogonal complement."""
        n = self.ambient_dim
        if self.dim == 0:
            return SubspaceBasis.whole(n)
        if self.dim == n:
            return SubspaceBasis.zero(n)
        Q, _ = np.linalg.qr(self.basis, mode="complete")
        return SubspaceBasis(n, Q[:, self.dim:])

    def coordinates(self, x) -> np.ndarray:
        return self.basis.conj().T @ as_vector(x, self.ambient_dim)

    def embed(self, y) -> np.ndarray:
        return self.basis @ as_vector(y, self.dim)


def distance_to_subspace(x, M: SubspaceBasis) -> float:
    """Euclidean distance from ``x`` to the subspace ``M``."""
    x = as_vector(x)
    if x.shape[0] != M.ambient_dim:
        raise DimensionMismatch(
            f"vector has length {x.shape[0]}, subspace lives in dimension {M.ambient_dim}"
        )
    # scale first: numpy's vector norm squares entries and underflows for tiny x
    big = float(np.max(np.abs(x), initial=0.0))
    if big == 0.0:
        return 0.0
    # a power of two keeps the rescaling exact, subnormals included
    e = math.frexp(big)[1]
    x = np.ldexp(x.real, -e) + 1j * np.ldexp(x.imag, -e)
    Q = M.basis
    if Q.shape[1] == 0:
        return math.ldexp(float(np.linalg.norm(x)), e)
    r = x - Q @ (Q.conj().T @ x)
    # second pass of classical Gram-Schmidt restores orthogonality
    r = r - Q @ (Q.conj().T @ r)
    return math.ldexp(float(np.linalg.norm(r)), e)


def restrict(A, M: SubspaceBasis) -> np.ndarray:
    """Matrix of ``A`` restricted to the (assumed invariant) subspace ``M``."""
    A = as_matrix(A)
    Q = M.basis
    return Q.conj().T @ A @ Q


# ---------------------------------------------------------------------------
# spectral data


@dataclass(frozen=True, eq=False)
class EigenChain:
    """Jordan chain ``xi, (A-mu) xi, ..., (A-mu)^(rank-1) xi`` stored as columns."""

    eigenvalue: complex
    vectors: np.ndarray

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    @property
    def head(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def eigenvector(self) -> np.ndarray:
        return self.vectors[:, -1]

    def residuals(self, A) -> np.ndarray:
        """``||(A - mu) v_k - v_{k+1}||`` for every link, the last against zero."""
        A = as_matrix(A)
        V = self.vectors
        image = A @ V - self.eigenvalue * V
        target = np.zeros_like(V)
        target[:, :-1] = V[:, 1:]
        return np.linalg.norm(image - target, axis=0)


@dataclass(frozen=True, eq=False)
class EigenCluster:
    eigenvalue: complex
    members: np.ndarray
    chains: tuple
    subspace: SubspaceBasis

    @property
    def algebraic(self) -> int:
        return int(self.members.shape[0])

    @property
    def geometric(self) -> int:
        return len(self.chains)

    @property
    def max_rank(self) -> int:
        return max(c.rank for c in self.chains)

    def eigenvectors(self) -> list:
        return [c.eigenvector for c in self.chains]


@dataclass(frozen=True, eq=False)
class SpectralData:
    clusters: tuple
    spectral_radius: float
    norm: float
    dim: int
    tol_rank: float
    cluster_radius: float
    tol: float = field(default=1e-9)

    def eigenvalues(self) -> np.ndarray:
        """Cluster eigenvalues repeated by algebraic multiplicity."""
        return np.concatenate(
            [np.full(c.algebraic, c.eigenvalue, dtype=np.complex128) for c in self.clusters]
        )

    def dominant(self) -> EigenCluster:
        """Cluster of largest modulus; ties go to the largest real part."""
        mods = np.array([abs(c.eigenvalue) for c in self.clusters])
        top = mods.max()
        tied = [c for c, m in zip(self.clusters, mods) if m >= top - self.cluster_radius]
        return max(tied, key=lambda c: c.eigenvalue.real)

    def cluster_near(self, mu: complex) -> EigenCluster:
        best, dist = None, math.inf
        for c in self.clusters:
            d = min(abs(mu - c.eigenvalue), float(np.min(np.abs(c.members - mu))))
            if d < dist:
                best, dist = c, d
        if best is None or dist > self.cluster_radius:
            raise NotAnEigenvalue(f"{mu} is not within {self.cluster_radius:.3g} of the spectrum")
        return best

    def jordan_form(self):
        """Return ``(V, J)`` with ``A V ~= V J``, chains ordered as stored."""
        cols, blocks = [], []
        for cl in self.clusters:
            for ch in cl.chains:
                cols.append(ch.vectors)
                k = ch.rank
                B = np.diag(np.full(k, ch.eigenvalue, dtype=np.complex128))
                B += np.diag(np.ones(k - 1), -1)
                blocks.append(B)
        return np.hstack(cols), scipy.linalg.block_diag(*blocks)


def _cluster_indices(w: np.ndarray, radius: float) -> list:
    """Single-linkage groups of ``w`` at the given radius, ordered deterministically."""
    n = w.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(w[:, None] - w[None, :])
    for i in range(n):
        for j in np.nonzero(dist[i, i + 1:] <= radius)[0]:
            a, b = find(i), find(i + 1 + int(j))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _null_basis(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of ``M`` (columns)."""
    m = M.shape[1]
    if m == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol))
    return Vh[rank:].conj().T


def _chains_from_block(T11: np.ndarray, mu: complex, tol: float, scale: float):
    """Jordan chains of the nearly nilpotent block ``T11 - mu``.

    Ranks are decided on the strictly upper part of the Schur block (exactly
    nilpotent); chain vectors are powers of the full block so that every
    link but the last holds exactly.
    """
    m = T11.shape[0]
    N = T11 - mu * np.eye(m)
    N0 = np.triu(N, 1)
    # splitting of a defective eigenvalue leaves noise of the same order in N0
    spread = float(np.max(np.abs(np.diag(N)))) if m else 0.0
    nrm = float(np.linalg.norm(N0, 2)) if m else 0.0
    kernels = [np.zeros((m, 0), dtype=np.complex128)]
    power = np.eye(m, dtype=np.complex128)
    while kernels[-1].shape[1] < m:
        power = N0 @ power
        k = len(kernels)
        kernels.append(_null_basis(power, max(tol * scale**k, 10 * spread * nrm ** (k - 1))))
    depth = len(kernels) - 1
    d = [K.shape[1] for K in kernels] + [m]
    heads = []  # (level, head vector)
    for k in range(depth, 0, -1):
        new = (d[k] - d[k - 1]) - (d[k + 1] - d[k])
        if new <= 0:
            continue
        avoid = [kernels[k - 1]]
        for level, h in heads:
            avoid.append((np.linalg.matrix_power(N0, level - k) @ h)[:, None])
        W = np.hstack(avoid)
        Kk = kernels[k]
        if W.shape[1]:
            Wq, ws, _ = np.linalg.svd(W, full_matrices=False)
            Wq = Wq[:, ws > 1e-12 * max(1.0, ws[0])]
            Kk = Kk - Wq @ (Wq.conj().T @ Kk)
        U, s, _ = np.linalg.svd(Kk, full_matrices=False)
        if s.size < new or s[new - 1] < 1e-8:
            raise NonConvergence("could not complete a Jordan basis for a cluster")
        for j in range(new):
            heads.append((k, U[:, j]))
    if sum(level for level, _ in heads) != m:
        raise NonConvergence("inconsistent nullity sequence while building Jordan chains")
    chains = []
    for level, h in heads:
        vecs = [h]
        for _ in range(level - 1):
            vecs.append(N @ vecs[-1])
        chains.append(np.column_stack(vecs))
    return chains


# relative size of the perturbation a defective eigenvalue may absorb; a
# Jordan block of size p splits into a p-gon of radius ~ DEFECT_EPS**(1/p)
DEFECT_EPS = 1e-12
# larger blocks blur beyond what double precision can resolve
MAX_DEFECT = 8
KAPPA_DEFECT = 1e4


def _cluster_block(A: np.ndarray, w: np.ndarray, groups: list, gi: int):
    """Leading block ``T11`` and basis ``Q1`` of an ordered Schur form for group ``gi``."""
    g = groups[gi]
    center = complex(np.mean(w[g]))
    spread = float(np.max(np.abs(w[g] - center)))
    others = [float(np.min(np.abs(w[h] - center))) for j, h in enumerate(groups) if j != gi]
    sel = spread + 0.5 * (min(others) - spread) if others else math.inf
    try:
        T, Z, sdim = scipy.linalg.schur(
            A, output="complex", sort=lambda z: abs(z - center) <= sel
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence(f"ordered Schur form failed: {exc}") from exc
    m = len(g)
    if sdim != m:
        raise NonConvergence(
            f"ordered Schur form selected {sdim} eigenvalues for a cluster of {m}"
        )
    return T[:m, :m], Z[:, :m]


def _merge_defective(A, w, groups, rank_tol, scale, kappa):
    """Merge nearby groups whose union behaves like one defective eigenvalue.

    A candidate union of size ``m`` is accepted when its Schur block has a
    Jordan chain of length ``p >= 2`` and the spread of the computed
    eigenvalues is below ``scale * DEFECT_EPS**(1/p)``.
    """
    groups = [list(g) for g in groups]
    # a p-fold split has condition numbers of order DEFECT_EPS**(1/p - 1)
    fragile = [bool(np.min(kappa[g]) > KAPPA_DEFECT) for g in groups]
    if not any(fragile):
        return groups
    changed = True
    while changed and len(groups) > 1:
        changed = False
        cents = np.array([np.mean(w[g]) for g in groups])
        cands = []
        fragile = [bool(np.min(kappa[g]) > KAPPA_DEFECT) for g in groups]
        for i in range(len(groups)):
            if not fragile[i]:
                continue
            order = list(np.argsort(np.abs(cents - cents[i])))
            picked = [order[0]]
            for j in order[1:]:
                picked = picked + [j]
                merged = [k for q in picked for k in groups[q]]
                if len(merged) > MAX_DEFECT:
                    break
                c = np.mean(w[merged])
                spread = float(np.max(np.abs(w[merged] - c)))
                if spread > scale * DEFECT_EPS ** (1.0 / len(merged)):
                    if spread > scale * DEFECT_EPS ** (1.0 / MAX_DEFECT):
                        break
                    continue
                cands.append((-len(merged), spread, tuple(sorted(picked))))
        seen = set()
        for _, spread, picked in sorted(cands):
            if picked in seen:
                continue
            seen.add(picked)
            trial = [g for k, g in enumerate(groups) if k not in picked]
            trial.insert(0, [k for q in picked for k in groups[q]])
            try:
                T11, _ = _cluster_block(A, w, trial, 0)
                mu = complex(np.mean(np.diag(T11)))
                chains = _chains_from_block(T11, mu, rank_tol, scale)
            except NonConvergence:
                continue
            p = max(c.shape[1] for c in chains)
            if p >= 2 and spread <= scale * DEFECT_EPS ** (1.0 / p):
                groups = trial
                changed = True
                break
    groups.sort(key=min)
    return groups


def _normalize_chain(V: np.ndarray) -> np.ndarray:
    last = V[:, -1]
    target = canonical_phase(last)
    # last != 0; the common scalar keeps every link (A - mu) v_k = v_{k+1}
    k = int(np.argmax(np.abs(last)))
    return V * (target[k] / last[k])


def eigen_spectrum(A, tol: float = 1e-9, tolerances: Tolerances = DEFAULT) -> SpectralData:
    """Clustered eigenvalues, multiplicities and generalized eigenchains of ``A``.

    Eigenvalues closer than ``cluster_radius * max(1, r_sigma)`` are treated
    as one eigenvalue (their mean).  Each cluster of size ``m > 1`` is moved
    to the leading block of an ordered complex Schur form; its Jordan
    structure is read off the nullity sequence of the nilpotent part at the
    rank tolerance ``tol_rank * max(1, ||A||)``.

    Raises
    ------
    NonConvergence
        If LAPACK fails or a Jordan basis cannot be completed.
    DimensionMismatch
        For non-square input.
    """
    A = as_matrix(A)
    n = A.shape[0]
    scale = _matrix_scale(A)
    try:
        w, Y, V = scipy.linalg.eig(A, left=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NonConvergence("eigensolver returned non-finite eigenvalues")
    r_sigma = float(np.max(np.abs(w)))
    radius = tolerances.cluster_radius * max(1.0, r_sigma)
    rank_tol = tolerances.tol_rank
    # eigenvalue condition numbers; split defective eigenvalues have huge ones
    overlap = np.abs(np.sum(Y.conj() * V, axis=0))
    with np.errstate(divide="ignore"):
        kappa = np.linalg.norm(Y, axis=0) * np.linalg.norm(V, axis=0) / overlap
    groups = _merge_defective(A, w, _cluster_indices(w, radius), rank_tol, scale, kappa)

    clusters = []
    for gi, g in enumerate(groups):
        members = np.sort_complex(w[g])
        if len(g) == 1:
            v = canonical_phase(V[:, g[0]])
            mu = complex(w[g[0]])
            chain = EigenChain(mu, v[:, None])
            clusters.append(EigenCluster(mu, members, (chain,), SubspaceBasis.span([v])))
            continue
        T11, Q1 = _cluster_block(A, w, groups, gi)
        mu = complex(np.mean(np.diag(T11)))
        chains = []
        for Vs in _chains_from_block(T11, mu, rank_tol, scale):
            chains.append(EigenChain(mu, _normalize_chain(Q1 @ Vs)))
        clusters.append(EigenCluster(mu, members, tuple(chains), SubspaceBasis(n, Q1)))

    clusters.sort(key=lambda c: (-abs(c.eigenvalue), -c.eigenvalue.real, -c.eigenvalue.imag))
    if sum(c.algebraic for c in clusters) != n:
        raise NonConvergence("algebraic multiplicities do not add up to the dimension")
    return SpectralData(
        clusters=tuple(clusters),
        spectral_radius=r_sigma,
        norm=float(np.linalg.norm(A, 2)),
        dim=n,
        tol_rank=rank_tol * scale,
        cluster_radius=radius,
        tol=tol,
    )


def multiplicities(A, mu: complex, spectrum: Optional[SpectralData] = None,
                   tolerances: Tolerances = DEFAULT):
    """``(algebraic, geometric)`` multiplicity of the eigenvalue near ``mu``.

    The geometric multiplicity comes from a rank-revealing SVD of
    ``A - mu I``, independently of the chain construction.
    """
    A = as_matrix(A)
    spectrum = spectrum if spectrum is not None else eigen_spectrum(A, tolerances=tolerances)
    cluster = spectrum.cluster_near(complex(mu))
    s = np.linalg.svd(A - cluster.eigenvalue * np.eye(A.shape[0]), compute_uv=False)
    geometric = int(np.sum(s <= spectrum.tol_rank))
    return cluster.algebraic, geometric


# ---------------------------------------------------------------------------
# flows


def _flow_shift(A: np.ndarray, t: float) -> float:
    w = scipy.linalg.eigvals(A)
    if not np.all(np.isfinite(w)):
        raise NonConvergence("eigensolver returned non-finite eigenvalues")
    re = w.real
    return float(re.max() if t >= 0 else re.min())


def flow_apply_normalized(A, t: float, x0, shift: Optional[float] = None):
    """Return ``(u, log_norm)`` with ``exp(A t) x0 = exp(log_norm) * u`` and ``||u|| = 1``.

    The exponential is evaluated in the shifted form ``exp((A - s I) t)``
    with ``s`` the extreme real part of the spectrum, which removes the
    exponential growth before scaling and squaring.  A zero result gives
    ``(0, -inf)``.
    """
    A = as_matrix(A)
    x0 = as_vector(x0, A.shape[0])
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("time must be finite")
    if shift is None:
        shift = _flow_shift(A, t)
    n = A.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm((A - shift * np.eye(n)) * t)
        y = E @ x0
    if not np.all(np.isfinite(y)):
        raise FlowOverflow(f"shifted exponential overflowed at t={t}")
    nrm = float(np.linalg.norm(y))
    if nrm == 0.0:
        return y, -math.inf
    return y / nrm, math.log(nrm) + shift * t


def flow_apply(A, t: float, x0, shift: Optional[float] = None) -> np.ndarray:
    """Semigroup action ``exp(A t) x0``.

    Raises
    ------
    FlowOverflow
        If the result is not representable even after shift normalization.
    """
    u, log_norm = flow_apply_normalized(A, t, x0, shift)
    if log_norm > LOG_FLOAT_MAX:
        raise FlowOverflow(f"|exp(At)x0| = exp({log_norm:.1f}) is not representable")
    if log_norm == -math.inf:
        return u
    return u * math.exp(log_norm)


# ---------------------------------------------------------------------------
# splitting


def invariant_split(A, rho: float, tol: float = 1e-9):
    """Invariant subspaces ``(X0, X1)`` for the spectrum inside/outside ``|z| = rho``.

    Raises
    ------
    SplitOnSpectrum
        If some eigenvalue lies within ``tol * r_sigma`` of the circle.
    """
    A = as_matrix(A)
    n = A.shape[0]
    rho = float(rho)
    if not rho > 0:
        raise ValueError("split radius must be positive")
    try:
        w = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence(f"eigensolver failed: {exc}") from exc
    r_sigma = float(np.max(np.abs(w)))
    band = tol * max(r_sigma, np.finfo(float).tiny)
    hit = np.abs(np.abs(w) - rho) <= band
    if np.any(hit):
        raise SplitOnSpectrum(
            f"eigenvalue {complex(w[np.argmax(hit)])} lies on the circle |z| = {rho}"
        )
    bases = []
    for inside in (True, False):
        select = (lambda z: abs(z) < rho) if inside else (lambda z: abs(z) > rho)
        try:
            _, Z, sdim = scipy.linalg.schur(A, output="complex", sort=select)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NonConvergence(f"ordered Schur form failed: {exc}") from exc
        bases.append(SubspaceBasis(n, Z[:, :sdim]))
    if bases[0].dim + bases[1].dim != n:
        raise NonConvergence("split dimensions do not add up")
    return bases[0], bases[1]


def spectral_projector_coordinates(subspaces: Sequence[SubspaceBasis]) -> np.ndarray:
    """Inverse of the concatenated bases: maps x to stacked coordinates."""
    B = np.hstack([S.basis for S in subspaces])
    if B.shape[0] != B.shape[1]:
        raise DimensionMismatch("subspaces do not form a direct sum of the space")
    return np.linalg.inv(B)
