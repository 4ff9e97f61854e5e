"""Perron pairs of cone-preserving operators and certification of their spectral picture.

Three certification paths share one report format:

* :func:`certify_dominant` checks the full dominant-eigenvalue picture of
  an operator on a cone: real dominant eigenvalue with an eigenvector in
  the cone, strict spectral gap, no other generalized eigenvector in the
  cone, semisimplicity and interior eigenvectors.
* :func:`certify_split` first cuts the space along a circle ``|z| = rho``,
  restricts everything to the outer invariant subspace and runs the same
  checks there.
* :func:`certify_real_cone` handles real matrices on real cones through
  their complexification and adds simplicity and interiority of the
  eigenvector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.optimize

from .cones import (
    Cone,
    Complexified,
    Restricted,
    arc_feasible,
    circle_align,
    cone_meets_subspace,
)
from .errors import (
    ConeSpecError,
    NonConvergence,
    NotEigenvectors,
    NotPositive,
    NotSolid,
)
from .linalg import (
    SubspaceBasis,
    as_matrix,
    as_vector,
    canonical_phase,
    distance_to_subspace,
    eigen_spectrum,
    flow_apply_normalized,
    invariant_split,
    multiplicities,
    projective_angle,
    restrict,
)
from .positivity import (
    CERTIFIED,
    UNDECIDED,
    VIOLATED,
    PositivityCertificate,
    certify_positive,
    certify_rotational_strong_positivity,
    complexify,
    decomplexify,
    strongly_positive_real,
)
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "Assertion",
    "CertificationReport",
    "EigenpairCertificate",
    "PhaseProbe",
    "certify_dominant",
    "certify_real_cone",
    "certify_split",
    "extract_perron_pair",
    "phase_family_probe",
    "positivity_to_dict",
    "search_counterexample",
    "spectrum_summary",
]

PASS, FAIL = "Pass", "Fail"
FLOW, DIRECT = "FlowExtraction", "DirectSpectral"

# compare directions across a factor 16 in time, i.e. more than a decade
DIRECTION_LAG = 4
MAX_DOUBLINGS = 90


# ---------------------------------------------------------------------------
# Perron pair extraction


@dataclass(frozen=True, eq=False)
class EigenpairCertificate:
    r: float
    w: np.ndarray
    residual: float
    cone_membership: float
    method: str
    final_time: float = 0.0
    direction_change: float = 0.0

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "w": self.w,
            "residual": self.residual,
            "cone_violation": self.cone_membership,
            "method": self.method,
            "final_time": self.final_time,
            "direction_change": self.direction_change,
        }


def _phase_into_cone(w: np.ndarray, K: Cone) -> np.ndarray:
    """``w`` rotated into ``K`` when possible; the canonical phase is preferred."""
    w = canonical_phase(w)
    if K.member(w):
        return w
    if K.has_facets:
        F, kind = K.facets()
        if kind == "quarter":
            arcs = arc_feasible(F @ w, closed=True)
            if arcs.span is not None:
                phi = 0.5 * (arcs.span[0] + arcs.span[1])
                z = complex(math.cos(phi), math.sin(phi))
                if K.member(z * w):
                    return z * w
        z = circle_align(w, K, closed=True)
        if z is not None:
            return z * w
    return w


def _spectral_radius(A: np.ndarray) -> tuple:
    w = np.linalg.eigvals(A)
    return float(np.max(np.abs(w))), float(np.max(w.real))


def _finish_pair(A, K, w, tolerances, method, final_time=0.0, change=0.0) -> EigenpairCertificate:
    w = w / np.linalg.norm(w)
    rq = complex(np.vdot(w, A @ w))
    r = rq.real
    # one inverse iteration step at the Rayleigh quotient
    M = A - r * np.eye(A.shape[0])
    with np.errstate(all="ignore"):
        try:
            y = np.linalg.solve(M, w)
        except np.linalg.LinAlgError:
            y = np.linalg.lstsq(M, w, rcond=None)[0]
    if np.all(np.isfinite(y)) and np.linalg.norm(y) > 0:
        y = y / np.linalg.norm(y)
        rq2 = complex(np.vdot(y, A @ y))
        if np.linalg.norm(A @ y - rq2.real * y) <= np.linalg.norm(A @ w - r * w):
            w, rq, r = y, rq2, rq2.real
    w = _phase_into_cone(w, K)
    residual = float(np.linalg.norm(A @ w - r * w))
    return EigenpairCertificate(float(r), w, residual, float(K.violation(w)), method,
                                float(final_time), float(change))


def extract_perron_pair(A, K: Cone, tolerances: Tolerances = DEFAULT, seed_vector=None,
                        method: str = "flow",
                        positivity: Optional[PositivityCertificate] = None) -> EigenpairCertificate:
    """Dominant eigenpair ``(r, w)`` with ``w`` in the cone.

    The flow method evolves the normalized state ``exp(A t) x0`` at times
    ``0.5 * 2^k`` from a point of the cone (the sum of its generators by
    default) until the projective direction changes by at most ``tol_dir``
    across four doublings.  Polynomial factors from a defective dominant
    eigenvalue cancel in the direction.  The limit is polished by one
    inverse iteration step.
    """
    A = as_matrix(A)
    if A.shape[0] != K.dim:
        raise ValueError("operator and cone disagree on the dimension")
    cert = positivity if positivity is not None else certify_positive(A, K, tolerances)
    if cert.verdict == VIOLATED:
        raise NotPositive("the operator does not leave the cone invariant")
    r_sigma, shift = _spectral_radius(A)
    if method == "direct":
        return _direct_pair(A, K, tolerances)
    if method != "flow":
        raise ValueError(f"unknown extraction method {method!r}")
    x0 = K.interior_point() if seed_vector is None else as_vector(seed_vector, K.dim)
    history = []
    change = math.inf
    t = 0.0
    for k in range(MAX_DOUBLINGS):
        t = 0.5 * 2.0**k
        u, log_norm = flow_apply_normalized(A, t, x0, shift)
        if log_norm == -math.inf:
            raise NonConvergence("the flow from the seed vanished")
        history.append(canonical_phase(u))
        if k >= DIRECTION_LAG:
            change = projective_angle(history[-1], history[-1 - DIRECTION_LAG])
            if change <= tolerances.tol_dir:
                break
    else:
        raise NonConvergence(
            f"direction still moving by {change:.3g} rad at t={t:.3g}"
        )
    pair = _finish_pair(A, K, history[-1], tolerances, FLOW, t, change)
    if abs(pair.r - r_sigma) > tolerances.tol_pair * max(r_sigma, 1e-300):
        raise NonConvergence(
            f"flow settled on r={pair.r!r} but the spectral radius is {r_sigma!r}"
        )
    return pair


def _direct_pair(A, K, tolerances) -> EigenpairCertificate:
    spec = eigen_spectrum(A, tolerances=tolerances)
    dom = spec.dominant()
    vecs = dom.eigenvectors()
    if len(vecs) == 1:
        w = vecs[0]
    else:
        w = cone_meets_subspace(K, SubspaceBasis.span(vecs, A.shape[0]))
        if w is None:
            raise NonConvergence("dominant eigenspace does not meet the cone")
    return _finish_pair(A, K, w, tolerances, DIRECT)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Assertion:
    name: str
    verdict: str
    asserted: bool
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "asserted": self.asserted,
                "evidence": self.evidence}


@dataclass
class CertificationReport:
    check: str
    assertions: list
    positivity: dict
    spectrum: dict
    tolerances: dict
    seed: int = 0
    dominant: Optional[dict] = None
    extra: dict = field(default_factory=dict)

    def assertion(self, name: str) -> Assertion:
        for a in self.assertions:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def any_fail(self) -> bool:
        return any(a.verdict == FAIL for a in self.assertions)

    @property
    def any_undecided(self) -> bool:
        return any(a.verdict == UNDECIDED for a in self.assertions) or any(
            isinstance(v, dict) and v.get("verdict") == UNDECIDED for v in self.positivity.values()
        )

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "assertions": [a.to_dict() for a in self.assertions],
            "positivity": self.positivity,
            "spectrum": self.spectrum,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "dominant": self.dominant,
        }
        out.update(self.extra)
        return out


def positivity_to_dict(cert: PositivityCertificate, limit: int = 5) -> dict:
    return {
        "verdict": cert.verdict,
        "method": cert.method,
        "probes_used": cert.probes_used,
        "witness_count": len(cert.witnesses),
        "witnesses": [
            {"x": w.x, "image": w.image, "reason": w.reason} for w in cert.witnesses[:limit]
        ],
    }


def spectrum_summary(spec) -> dict:
    return {
        "spectral_radius": spec.spectral_radius,
        "tol_rank": spec.tol_rank,
        "cluster_radius": spec.cluster_radius,
        "clusters": [
            {
                "eigenvalue": c.eigenvalue,
                "algebraic": c.algebraic,
                "geometric": c.geometric,
                "chain_ranks": sorted((ch.rank for ch in c.chains), reverse=True),
            }
            for c in spec.clusters
        ],
    }


def _rotational(A, K, tolerances, seed) -> PositivityCertificate:
    try:
        return certify_rotational_strong_positivity(A, K, tolerances, seed=seed)
    except NotSolid:
        return PositivityCertificate(UNDECIDED, "NotSolid", 0, ())


def _valid_witness(K: Cone, w, S: SubspaceBasis, tolerances) -> bool:
    return (K.violation(w) <= 10 * tolerances.tol_cone
            and distance_to_subspace(w, S) <= 1e-8 * np.linalg.norm(w))


def certify_dominant(A, K: Cone, tolerances: Tolerances = DEFAULT, seed: int = 0,
                     positivity: Optional[PositivityCertificate] = None,
                     rotational: Optional[PositivityCertificate] = None,
                     check: str = "dominant") -> CertificationReport:
    """Certify the spectral picture of a cone-preserving operator.

    Assertions, in order:

    ``dominant_pair``
        the spectral radius is an eigenvalue with an eigenvector in ``K``
        (flow extraction, with the direct eigensolver as fallback).
    ``spectral_gap``
        every other eigenvalue, counted with multiplicity, is strictly
        inside the circle of radius ``r_sigma``.  Moduli within ``gap_tol``
        of ``r_sigma`` give Undecided; repeated or exact ties give Fail.
    ``no_other_cone_eigenvectors``
        no generalized eigenspace of another eigenvalue meets ``K``, and no
        chain vector of one can be rotated into ``K``.
    ``semisimple_dominant``
        algebraic and geometric multiplicity of ``r_sigma`` agree.
    ``interior_dominant_eigenvectors``
        every computed eigenvector of ``r_sigma`` rotates into ``int K``.

    The first is asserted when the operator is certified positive; the
    rest only when rotational strong positivity is certified, and are
    informational otherwise.
    """
    A = as_matrix(A)
    n = A.shape[0]
    spec = eigen_spectrum(A, tolerances=tolerances)
    pos = positivity if positivity is not None else certify_positive(A, K, tolerances, seed=seed)
    rot = rotational if rotational is not None else _rotational(A, K, tolerances, seed)
    positive_ok = pos.verdict == CERTIFIED
    rsp_ok = rot.verdict == CERTIFIED
    r_sigma = spec.spectral_radius
    dom = spec.dominant()
    assertions = []

    # dominant pair
    pair, evidence = None, {}
    if pos.verdict == VIOLATED:
        verdict = UNDECIDED
        evidence["reason"] = "operator is not positive on the cone"
    else:
        try:
            pair = extract_perron_pair(A, K, tolerances, positivity=pos)
        except ConeSpecError as exc:
            evidence["flow_failure"] = str(exc)
            try:
                pair = _direct_pair(A, K, tolerances)
            except ConeSpecError as exc2:
                evidence["direct_failure"] = str(exc2)
        if pair is None:
            verdict = FAIL
        else:
            evidence.update(pair.to_dict())
            ok = (
                pair.residual <= tolerances.tol_pair * max(1.0, spec.norm)
                and pair.cone_membership <= 10 * tolerances.tol_cone
                and abs(pair.r - r_sigma) <= tolerances.tol_pair * max(r_sigma, 1e-300)
                and abs(dom.eigenvalue.imag) <= spec.cluster_radius
            )
            verdict = PASS if ok else FAIL
    evidence["spectral_radius"] = r_sigma
    assertions.append(Assertion("dominant_pair", verdict, positive_ok, evidence))

    # spectral gap, counted with multiplicity
    others = [c for c in spec.clusters if c is not dom]
    second = max((abs(c.eigenvalue) for c in others), default=0.0)
    evidence = {"spectral_radius": r_sigma, "dominant_multiplicity": dom.algebraic,
                "second_modulus": second}
    tie = 1e-12 * r_sigma
    if dom.algebraic > 1:
        verdict = FAIL
        evidence["witness"] = {"eigenvalue": dom.eigenvalue, "reason": "repeated dominant eigenvalue"}
    elif r_sigma == 0.0:
        verdict = FAIL
        evidence["witness"] = {"eigenvalue": 0.0, "reason": "spectral radius is zero"}
    elif second >= r_sigma - tie:
        verdict = FAIL
        hit = max(others, key=lambda c: abs(c.eigenvalue))
        evidence["witness"] = {"eigenvalue": hit.eigenvalue, "reason": "second eigenvalue on the circle"}
    elif second >= r_sigma * (1 - tolerances.gap_tol):
        verdict = UNDECIDED
    else:
        verdict = PASS
    evidence["relative_gap"] = (r_sigma - second) / r_sigma if r_sigma else 0.0
    assertions.append(Assertion("spectral_gap", verdict, rsp_ok, evidence))

    # no generalized eigenvector of another eigenvalue in the cone
    witness = None
    undecided = False
    for c in others:
        vecs = [ch.vectors[:, j] for ch in c.chains for j in range(ch.rank)]
        S = SubspaceBasis.span(vecs, n)
        try:
            w = cone_meets_subspace(K, S)
        except ConeSpecError:
            undecided = True
            continue
        if w is not None:
            if _valid_witness(K, w, S, tolerances):
                witness = {"eigenvalue": c.eigenvalue, "vector": w, "via": "subspace"}
                break
            undecided = True
        if K.has_facets:
            for v in vecs:
                z = circle_align(v, K, closed=True)
                if z is not None:
                    witness = {"eigenvalue": c.eigenvalue, "vector": z * v, "via": "phase"}
                    break
        if witness:
            break
    evidence = {"clusters_checked": len(others)}
    if witness is not None:
        verdict = FAIL
        evidence["witness"] = witness
    else:
        verdict = UNDECIDED if undecided else PASS
    assertions.append(Assertion("no_other_cone_eigenvectors", verdict, rsp_ok, evidence))

    # multiplicities of r_sigma
    alg, geo = multiplicities(A, dom.eigenvalue, spec, tolerances)
    assertions.append(Assertion(
        "semisimple_dominant", PASS if alg == geo else FAIL, rsp_ok,
        {"eigenvalue": dom.eigenvalue, "algebraic": alg, "geometric": geo},
    ))

    # interior eigenvectors of r_sigma
    evidence = {"eigenvectors": len(dom.chains)}
    if not K.solid:
        verdict = UNDECIDED
        evidence["reason"] = "cone has no interior description"
    else:
        phases, missing = [], None
        for xi in dom.eigenvectors():
            z = circle_align(xi, K, closed=False)
            if z is None:
                missing = xi
                break
            phases.append(z)
        verdict = PASS if missing is None else FAIL
        evidence["phases"] = phases
        if missing is not None:
            evidence["witness"] = {"eigenvector": missing, "reason": "no phase reaches the interior"}
    assertions.append(Assertion("interior_dominant_eigenvectors", verdict, rsp_ok, evidence))

    return CertificationReport(
        check=check,
        assertions=assertions,
        positivity={"positive": positivity_to_dict(pos), "rotational": positivity_to_dict(rot)},
        spectrum=spectrum_summary(spec),
        tolerances=tolerances.as_dict(),
        seed=seed,
        dominant=None if pair is None else pair.to_dict(),
    )


def certify_split(A, K: Cone, rho: float, tolerances: Tolerances = DEFAULT,
                  seed: int = 0) -> CertificationReport:
    """Split at ``|z| = rho``, restrict to the outer invariant subspace and certify there.

    The restricted cone is ``K ∩ X1`` in orthonormal coordinates of
    ``X1``.  Positivity and rotational strong positivity are inherited
    from the full space when certified there (``X1`` is invariant, and
    ``int K ∩ X1`` is the relative interior once it is nonempty);
    otherwise they are probed on the restriction.
    """
    A = as_matrix(A)
    n = A.shape[0]
    X0, X1 = invariant_split(A, rho, tol=tolerances.tol_rank)
    assertions = []
    pos = certify_positive(A, K, tolerances, seed=seed)
    rot = _rotational(A, K, tolerances, seed)
    extra = {"rho": float(rho), "split_dims": [X0.dim, X1.dim]}

    w = cone_meets_subspace(K, X1) if X1.dim else None
    assertions.append(Assertion(
        "cone_meets_outer_subspace", PASS if w is not None else FAIL, pos.verdict == CERTIFIED,
        {"witness": w, "outer_dim": X1.dim},
    ))
    report_pos = {"positive": positivity_to_dict(pos), "rotational": positivity_to_dict(rot)}
    if w is None:
        return CertificationReport("split", assertions, report_pos,
                                   spectrum_summary(eigen_spectrum(A, tolerances=tolerances)),
                                   tolerances.as_dict(), seed, None, extra)

    K1 = Restricted(K, X1)
    A1 = restrict(A, X1)
    solid = K1.solid
    assertions.append(Assertion(
        "restricted_cone_solid", PASS if solid else FAIL, True,
        {"interior_point": K1.interior_point() if solid else None},
    ))
    if pos.verdict == CERTIFIED:
        pos1 = PositivityCertificate(CERTIFIED, "Inherited", pos.probes_used, ())
    else:
        pos1 = certify_positive(A1, K1, tolerances, seed=seed)
    if rot.verdict == CERTIFIED:
        rot1 = PositivityCertificate(CERTIFIED, "Inherited", rot.probes_used, ())
    else:
        rot1 = _rotational(A1, K1, tolerances, seed) if solid else PositivityCertificate(
            UNDECIDED, "NotSolid", 0, ())
    assertions.append(Assertion(
        "restricted_positivity", {CERTIFIED: PASS, VIOLATED: FAIL}.get(pos1.verdict, UNDECIDED),
        pos.verdict == CERTIFIED, positivity_to_dict(pos1),
    ))
    inner = certify_dominant(A1, K1, tolerances, seed, positivity=pos1, rotational=rot1)
    for a in inner.assertions:
        assertions.append(Assertion("restricted." + a.name, a.verdict, a.asserted, a.evidence))
    dominant = None
    if inner.dominant is not None:
        dominant = dict(inner.dominant)
        dominant["w"] = _phase_into_cone(X1.embed(dominant["w"]), K)
    report_pos["restricted_positive"] = positivity_to_dict(pos1)
    report_pos["restricted_rotational"] = positivity_to_dict(rot1)
    extra["restricted_spectrum"] = inner.spectrum
    return CertificationReport("split", assertions, report_pos,
                               spectrum_summary(eigen_spectrum(A, tolerances=tolerances)),
                               tolerances.as_dict(), seed, dominant, extra)


def certify_real_cone(B, P: Cone, tolerances: Tolerances = DEFAULT, seed: int = 0) -> CertificationReport:
    """Real matrix on a real cone, certified through its complexification.

    On top of the complex checks: when ``B`` maps the cone minus the origin
    into its interior, the dominant eigenvalue must be simple and its real
    eigenvector interior.
    """
    B = np.asarray(B)
    Breal = decomplexify(B) if np.iscomplexobj(B) else np.asarray(B, dtype=float)
    if isinstance(P, Complexified):
        P = P.base
    span_rank = int(np.linalg.matrix_rank(P.real_generators())) if P.has_generators else P.dim
    A = complexify(Breal)
    K = Complexified(P)
    report = certify_dominant(A, K, tolerances, seed, check="real")
    strong = strongly_positive_real(Breal, P, tolerances.tol_cone)
    report.positivity["strongly_positive"] = strong
    report.positivity["total"] = span_rank == P.dim
    spec = eigen_spectrum(A, tolerances=tolerances)
    dom = spec.dominant()
    alg, geo = multiplicities(A, dom.eigenvalue, spec, tolerances)
    report.assertions.append(Assertion(
        "simple_dominant", PASS if alg == geo == 1 else FAIL, strong,
        {"eigenvalue": dom.eigenvalue, "algebraic": alg, "geometric": geo},
    ))
    evidence = {}
    verdict = FAIL
    if report.dominant is not None:
        w = canonical_phase(np.asarray(report.dominant["w"]))
        xi = w.real
        evidence = {"r": report.dominant["r"], "eigenvector": xi,
                    "imaginary_part": float(np.linalg.norm(w.imag))}
        if np.linalg.norm(w.imag) <= 1e-8 and P.solid and P.interior_member(xi):
            verdict = PASS
    assertions_name = "interior_real_eigenvector"
    report.assertions.append(Assertion(assertions_name, verdict, strong, evidence))
    return report


# ---------------------------------------------------------------------------
# phase family probe


@dataclass(frozen=True, eq=False)
class PhaseProbe:
    t_grid: np.ndarray
    feasible: np.ndarray
    min_violation: np.ndarray
    bracket: tuple
    witness: Optional[tuple]


def _pair_violation(Fa, Fb, na2, nb2, ip, t, phi1, phi2, kind):
    z1 = np.exp(1j * phi1)[:, None, None]
    z2 = np.exp(1j * phi2)[None, :, None]
    v = z1 * Fa[None, None, :] + t * z2 * Fb[None, None, :]
    if kind == "quarter":
        bad = np.maximum(0.0, np.maximum(-v.real.min(axis=2), -v.imag.min(axis=2)))
    else:
        bad = np.maximum(0.0, np.maximum(-v.real.min(axis=2), np.abs(v.imag).max(axis=2)))
    cross = (np.conj(z1) * z2)[..., 0]
    norm2 = na2 + t * t * nb2 + 2 * t * (cross * ip).real
    return bad / np.sqrt(np.maximum(norm2, 1e-300))


def phase_family_probe(A, K: Cone, xi, eta, t_grid: Sequence[float], phases: int = 360,
                       tolerances: Tolerances = DEFAULT) -> PhaseProbe:
    """Feasibility of ``{z1 xi + t z2 eta : |z1| = |z2| = 1} ∩ K`` along a grid of ``t``.

    A ``phases x phases`` grid over ``(z1, z2)`` is followed by a local
    refinement of the best cell.  The result brackets the first ``t`` at
    which the family leaves the cone; it is a bracket, never a point value.
    """
    A = as_matrix(A)
    xi = as_vector(xi, K.dim)
    eta = as_vector(eta, K.dim)
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    for name, v in (("xi", xi), ("eta", eta)):
        lam = complex(np.vdot(v, A @ v) / np.vdot(v, v))
        if np.linalg.norm(A @ v - lam * v) > tolerances.tol_pair * scale * np.linalg.norm(v):
            raise NotEigenvectors(f"{name} is not an eigenvector")
    F, kind = K.facets()
    Fa, Fb = F @ xi, F @ eta
    na2, nb2 = float(np.vdot(xi, xi).real), float(np.vdot(eta, eta).real)
    ip = complex(np.vdot(xi, eta))
    grid = np.linspace(0, 2 * math.pi, phases, endpoint=False)
    ts = np.asarray(t_grid, dtype=float)
    feas, minv, best = [], [], []
    tol = 10 * tolerances.tol_cone
    for t in ts:
        V = _pair_violation(Fa, Fb, na2, nb2, ip, t, grid, grid, kind)
        i, j = np.unravel_index(int(np.argmin(V)), V.shape)
        p0 = np.array([grid[i], grid[j]])
        val = float(V[i, j])
        if val > tol:
            f = lambda p: float(_pair_violation(Fa, Fb, na2, nb2, ip, t, p[:1], p[1:], kind)[0, 0])
            res = scipy.optimize.minimize(f, p0, method="Nelder-Mead",
                                          options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
            if res.fun < val:
                val, p0 = float(res.fun), res.x
        feas.append(val <= tol)
        minv.append(val)
        best.append((complex(np.exp(1j * p0[0])), complex(np.exp(1j * p0[1])), float(t)))
    feas = np.array(feas)
    lo = hi = None
    witness = None
    for k in range(len(ts)):
        if feas[k]:
            lo, witness = float(ts[k]), best[k]
        else:
            hi = float(ts[k])
            break
    return PhaseProbe(ts, feas, np.array(minv), (lo, hi), witness)


# ---------------------------------------------------------------------------
# search for a geometrically multiple dominant eigenvalue


def _search_one(family: str, n: int, seed: int, tolerances: Tolerances) -> dict:
    from .families import generate
    from .serialize import digest

    inst = generate(family, n, seed)
    A, K = inst.matrix, inst.cone
    record = {"n": n, "seed": seed, "digest": digest(inst.to_json())}
    pos = certify_positive(A, K, tolerances, seed=seed)
    rot = _rotational(A, K, tolerances, seed)
    record["positivity"] = pos.verdict
    record["rotational"] = rot.verdict
    if pos.verdict != CERTIFIED or not (
        rot.verdict == CERTIFIED or (rot.verdict == UNDECIDED and not rot.witnesses)
    ):
        record["gate"] = "excluded"
        return record
    spec = eigen_spectrum(A, tolerances=tolerances)
    dom = spec.dominant()
    alg, geo = multiplicities(A, dom.eigenvalue, spec, tolerances)
    record.update(gate="included", eigenvalue=dom.eigenvalue, algebraic=alg, geometric=geo)
    if geo >= 2:
        record["instance"] = inst.to_json()
    return record


def search_counterexample(family: str, sizes: Iterable[int], seeds: Iterable[int],
                          tolerances: Tolerances = DEFAULT, resume: Optional[dict] = None,
                          strict: bool = False, workers: int = 1, progress=None) -> dict:
    """Look for rotationally strongly positive instances whose dominant eigenvalue has geometric multiplicity >= 2.

    Each ``(n, seed)`` instance is generated deterministically and gated
    on certified positivity plus rotational strong positivity (Certified,
    or Undecided without a violating probe).  Included instances add to a
    multiplicity histogram; any with multiplicity >= 2 is listed with its
    full instance data.  Absence of findings is not a claim.

    ``resume`` is a previous (possibly partial) result; its records are
    reused so the final output equals a fresh run.  Numerical failures are
    recorded as skipped, or raised when ``strict``.
    """
    from concurrent.futures import ThreadPoolExecutor

    from . import __version__
    from .rng import ALGORITHM

    sizes, seeds = [int(n) for n in sizes], [int(s) for s in seeds]
    done = {}
    if resume:
        if resume.get("family") != family:
            raise ValueError("resume file belongs to a different family")
        for rec in resume.get("records", []):
            done[(rec["n"], rec["seed"])] = rec
    todo = [(n, s) for n in sizes for s in seeds if (n, s) not in done]

    def run(key):
        n, s = key
        try:
            return _search_one(family, n, s, tolerances)
        except ConeSpecError as exc:
            if strict:
                raise
            return {"n": n, "seed": s, "gate": "skipped", "error": f"{type(exc).__name__}: {exc}"}

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            fresh = list(pool.map(run, todo))
    else:
        fresh = []
        for key in todo:
            fresh.append(run(key))
            if progress is not None:
                progress(fresh[-1])
    for rec in fresh:
        done[(rec["n"], rec["seed"])] = rec
    # merged by (n, seed) so that order of completion never matters
    records = [done[(n, s)] for n in sizes for s in seeds]
    histogram: dict = {}
    for rec in records:
        if rec["gate"] == "included":
            key = str(rec["geometric"])
            histogram[key] = histogram.get(key, 0) + 1
    return {
        "family": family,
        "sizes": sizes,
        "seeds": seeds,
        "rng": ALGORITHM,
        "tool_version": __version__,
        "tolerances": tolerances.as_dict(),
        "records": [{k: v for k, v in r.items() if k != "instance"} for r in records],
        "histogram": histogram,
        "included": sum(1 for r in records if r["gate"] == "included"),
        "excluded": sum(1 for r in records if r["gate"] == "excluded"),
        "skipped": [r for r in records if r["gate"] == "skipped"],
        "findings": [r for r in records if r["gate"] == "included" and r["geometric"] >= 2],
    }
