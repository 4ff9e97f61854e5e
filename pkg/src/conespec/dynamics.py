"""Shifted linear flows ``x' = (A + alpha) x`` and their long-time behaviour."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cones import Cone
from .errors import ExpansionFailure, FlowOverflow, InsufficientData
from .linalg import (
    LOG_FLOAT_MAX,
    as_matrix,
    as_vector,
    canonical_phase,
    eigen_spectrum,
    flow_apply_normalized,
)
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "AsymptoticProfile",
    "FlowTrajectory",
    "GammaResidual",
    "InvarianceReport",
    "ProfileTerm",
    "asymptotic_profile",
    "default_grid",
    "estimate_growth",
    "evolve",
    "gamma_residual",
    "monitor_cone_invariance",
    "trajectory_csv",
]


def default_grid(points: int = 200, t_min: float = 0.01, t_max: float = 40.0) -> np.ndarray:
    """Geometric grid; covers the transient and the asymptotic regime."""
    return np.geomspace(t_min, t_max, points)


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    """States of ``exp(alpha t) exp(A t) x0`` on a grid.

    In normalized mode every state has unit norm and ``log_norms`` holds
    the logarithm of the true magnitude.
    """

    times: np.ndarray
    states: np.ndarray  # one row per time
    log_norms: np.ndarray
    alpha_used: float
    normalized: bool

    def __len__(self):
        return self.times.shape[0]

    def state(self, k: int, unnormalized: bool = False) -> np.ndarray:
        if unnormalized and self.normalized:
            return self.states[k] * math.exp(self.log_norms[k])
        return self.states[k]


def evolve(A, alpha_shift: float, x0, time_grid: Sequence[float],
           normalized: bool = True) -> FlowTrajectory:
    A = as_matrix(A)
    x0 = as_vector(x0, A.shape[0])
    if not np.any(x0):
        raise ValueError("initial state must be nonzero")
    times = np.asarray(time_grid, dtype=float).ravel()
    if times.size == 0 or np.any(np.diff(times) <= 0) or not np.all(np.isfinite(times)):
        raise ValueError("time grid must be nonempty and strictly increasing")
    alpha = float(alpha_shift)
    states, logs = [], []
    for t in times:
        u, log_norm = flow_apply_normalized(A, t, x0)
        log_norm += alpha * t
        if not normalized:
            if log_norm > LOG_FLOAT_MAX:
                raise FlowOverflow(f"state at t={t} is not representable")
            u = u * math.exp(log_norm) if log_norm > -math.inf else u
        states.append(u)
        logs.append(log_norm)
    return FlowTrajectory(times, np.array(states), np.array(logs), alpha, normalized)


@dataclass(frozen=True)
class InvarianceReport:
    max_violation: float
    at_time: float
    count_above: int
    threshold: float

    @property
    def invariant(self) -> bool:
        return self.count_above == 0


def monitor_cone_invariance(traj: FlowTrajectory, K: Cone,
                            tolerances: Tolerances = DEFAULT) -> InvarianceReport:
    """Largest relative membership violation along the trajectory."""
    threshold = 10 * tolerances.tol_cone
    viol = np.array([K.violation(s) for s in traj.states])
    k = int(np.argmax(viol))
    return InvarianceReport(float(viol[k]), float(traj.times[k]),
                            int(np.sum(viol > threshold)), threshold)


# ---------------------------------------------------------------------------
# asymptotic profile


@dataclass(frozen=True, eq=False)
class ProfileTerm:
    coefficient: complex
    beta: float
    vector: np.ndarray
    eigenvalue: complex


@dataclass(frozen=True, eq=False)
class AsymptoticProfile:
    """``x(t) ~ t^nu exp(alpha t) Gamma(t)`` with ``Gamma(t) = sum c_i exp(i beta_i t) w_i``."""

    alpha: float
    nu: int
    terms: tuple

    def gamma(self, t: float) -> np.ndarray:
        out = np.zeros_like(self.terms[0].vector)
        for term in self.terms:
            out = out + term.coefficient * np.exp(1j * term.beta * t) * term.vector
        return out


def asymptotic_profile(A, x0, tolerances: Tolerances = DEFAULT) -> AsymptoticProfile:
    """Growth rate, polynomial power and limit profile of ``exp(A t) x0``.

    ``x0`` is expanded in the Jordan basis.  Along a chain
    ``v_0, ..., v_{k-1}`` (``v_{k-1}`` the eigenvector) the component on
    ``v_j`` grows like ``t^(k-1-j) / (k-1-j)! exp(mu t) v_{k-1}``, so only
    the first nonzero component of each chain matters.  Components below
    ``coeff_floor * ||x0||`` count as absent.
    """
    A = as_matrix(A)
    x0 = as_vector(x0, A.shape[0])
    nx = float(np.linalg.norm(x0))
    if nx == 0.0:
        raise ValueError("initial state must be nonzero")
    spec = eigen_spectrum(A, tolerances=tolerances)
    V, _ = spec.jordan_form()
    cond = float(np.linalg.cond(V))
    if not cond < 1e12:
        raise ExpansionFailure(f"Jordan basis is too ill-conditioned (cond {cond:.2e})")
    a = np.linalg.solve(V, x0)
    if np.linalg.norm(V @ a - x0) > 1e-8 * nx * max(1.0, cond * 1e-4):
        raise ExpansionFailure("chain coordinates do not reproduce the initial state")
    floor = tolerances.coeff_floor * nx
    leading = []  # (cluster index, mu, power, coefficient, eigenvector)
    col = 0
    for ci, cl in enumerate(spec.clusters):
        for ch in cl.chains:
            k = ch.rank
            comp = a[col : col + k]
            sizes = np.abs(comp) * np.linalg.norm(ch.vectors, axis=0)
            col += k
            nz = np.nonzero(sizes > floor)[0]
            if nz.size == 0:
                continue
            j0 = int(nz[0])
            power = k - 1 - j0
            leading.append((ci, cl.eigenvalue, power, comp[j0] / math.factorial(power), ch.eigenvector))
    if not leading:
        raise ExpansionFailure("initial state has no component above the coefficient floor")
    radius = spec.cluster_radius
    alpha = max(mu.real for _, mu, _, _, _ in leading)
    top = [item for item in leading if item[1].real >= alpha - radius]
    nu = max(p for _, _, p, _, _ in top)
    combined: dict = {}
    for ci, mu, p, c, w in top:
        if p == nu:
            entry = combined.setdefault(ci, [mu, 0])
            entry[1] = entry[1] + c * w
    terms = []
    for ci in sorted(combined):
        mu, vec = combined[ci]
        if np.linalg.norm(vec) <= floor:
            continue
        w = canonical_phase(vec)
        terms.append(ProfileTerm(complex(np.vdot(w, vec)), float(mu.imag), w, complex(mu)))
    if not terms:
        raise ExpansionFailure("leading terms cancel")
    alpha = float(np.mean([t.eigenvalue.real for t in terms]))
    return AsymptoticProfile(alpha, int(nu), tuple(terms))


@dataclass(frozen=True)
class GammaResidual:
    residual: float
    relative: float
    ode_residual: float
    ode_ok: bool

    def __float__(self):
        return self.residual


def gamma_residual(A, profile: AsymptoticProfile, x0, t: float, h: float = 1e-5) -> GammaResidual:
    """``||t^-nu exp(-alpha t) x(t) - Gamma(t)||``, plus a finite-difference check of ``Gamma' = (A - alpha) Gamma``."""
    A = as_matrix(A)
    x0 = as_vector(x0, A.shape[0])
    t = float(t)
    if t <= 0:
        raise ValueError("residual time must be positive")
    u, log_norm = flow_apply_normalized(A, t, x0)
    scaled = u * math.exp(log_norm - profile.alpha * t - profile.nu * math.log(t))
    g = profile.gamma(t)
    res = float(np.linalg.norm(scaled - g))
    gn = float(np.linalg.norm(g))
    deriv = (profile.gamma(t + h) - profile.gamma(t - h)) / (2 * h)
    ode = float(np.linalg.norm(deriv - (A - profile.alpha * np.eye(A.shape[0])) @ g))
    return GammaResidual(res, res / gn if gn else math.inf, ode, ode <= 1e-6 * gn)


def estimate_growth(traj: FlowTrajectory, min_samples: int = 20, min_tmax: float = 10.0):
    """Fit ``log||exp(A t) x0|| ~ alpha t + nu log t + c`` on the tail ``t >= t_max / 4``.

    Independent of the spectral machinery; the shift used to produce the
    trajectory is removed first.
    """
    times = np.asarray(traj.times)
    t_max = float(times[-1])
    if t_max < min_tmax:
        raise InsufficientData(f"trajectory ends at t={t_max}, need at least {min_tmax}")
    tail = times >= t_max / 4
    if int(tail.sum()) < min_samples:
        raise InsufficientData(f"only {int(tail.sum())} samples in the tail, need {min_samples}")
    t = times[tail]
    if traj.normalized:
        logs = traj.log_norms[tail]
    else:
        logs = np.log(np.linalg.norm(traj.states[tail], axis=1))
    logs = logs - traj.alpha_used * t
    if not np.all(np.isfinite(logs)):
        raise InsufficientData("trajectory vanishes on the tail")
    X = np.column_stack([t, np.log(t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(X, logs, rcond=None)
    return float(coef[0]), max(0, int(round(coef[1])))


def trajectory_csv(traj: FlowTrajectory, extra: Optional[dict] = None) -> str:
    """CSV text with header ``t,re_0,im_0,...,log_norm`` and 17 significant digits."""
    n = traj.states.shape[1]
    header = ["t"] + [f"{p}_{k}" for k in range(n) for p in ("re", "im")] + ["log_norm"]
    extra = extra or {}
    header += list(extra)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    fmt = lambda v: format(float(v), ".17g")
    for k, t in enumerate(traj.times):
        s = traj.states[k]
        row = [fmt(t)]
        for z in s:
            row += [fmt(z.real), fmt(z.imag)]
        row.append(fmt(traj.log_norms[k]))
        row += [str(col[k]) for col in extra.values()]
        w.writerow(row)
    return buf.getvalue()
