import math

import numpy as np
import pytest

from conespec.cones import Complexified, Orthant
from conespec.dynamics import (
    asymptotic_profile,
    default_grid,
    estimate_growth,
    evolve,
    gamma_residual,
    monitor_cone_invariance,
    trajectory_csv,
)
from conespec.errors import InsufficientData
from conespec.positivity import complexify

J2 = np.array([[2.0, 1.0], [0.0, 2.0]])
E1, E2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])


def test_evolve_examples():
    traj = evolve(np.zeros((2, 2)), 1.0, E1, [1.0], normalized=False)
    assert np.allclose(traj.states[0], math.e * E1)
    traj = evolve(np.diag([2.0, 1.0]), -2.0, np.ones(2), [1.0, 10.0, 40.0], normalized=False)
    assert np.allclose(traj.states[-1], E1, atol=1e-15)


def test_normalized_and_raw_directions_agree():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    x0 = rng.normal(size=4)
    grid = np.linspace(0.1, 5, 20)
    a = evolve(A, 0.0, x0, grid)
    b = evolve(A, 0.0, x0, grid, normalized=False)
    for k in range(len(grid)):
        raw = b.states[k] / np.linalg.norm(b.states[k])
        assert np.allclose(a.states[k], raw, atol=1e-12)
        assert a.log_norms[k] == pytest.approx(math.log(np.linalg.norm(b.states[k])))


def test_monitoring_examples():
    K = Complexified(Orthant(2))
    traj = evolve(complexify([[2, 1], [1, 2]]), 0.0, np.ones(2), np.linspace(0, 5, 50))
    assert monitor_cone_invariance(traj, K).count_above == 0
    traj = evolve(np.array([[0.0, -1.0], [-1.0, 0.0]]), 0.0, E1, np.linspace(0, 5, 50))
    rep = monitor_cone_invariance(traj, Orthant(2))
    assert rep.count_above > 0 and rep.at_time > 0
    assert monitor_cone_invariance(evolve(np.zeros((2, 2)), 0.0, E1, default_grid()), Orthant(2)).invariant


def test_profile_examples():
    p = asymptotic_profile(J2, E2)
    assert (p.alpha, p.nu) == (pytest.approx(2.0), 1)
    (term,) = p.terms
    assert abs(np.vdot(term.vector, E1)) == pytest.approx(1.0)
    p = asymptotic_profile(np.diag([1.0, 2.0]), np.ones(2))
    assert (p.alpha, p.nu) == (pytest.approx(2.0), 0)
    assert np.allclose(p.gamma(0.0), E2)
    p = asymptotic_profile(np.array([[0.0, -1.0], [1.0, 0.0]]), E1)
    assert (p.alpha, p.nu) == (pytest.approx(0.0, abs=1e-12), 0)
    assert sorted(t.beta for t in p.terms) == pytest.approx([-1.0, 1.0])


def test_growth_estimates():
    traj = evolve(np.diag([2.0, 1.0]), 0.0, np.ones(2), default_grid())
    a, nu = estimate_growth(traj)
    assert a == pytest.approx(2.0, abs=0.01) and nu == 0
    a, nu = estimate_growth(evolve(J2, 0.0, E2, default_grid()))
    assert a == pytest.approx(2.0, abs=0.01) and nu == 1
    a, nu = estimate_growth(evolve(np.array([[0.0, -1.0], [1.0, 0.0]]), 0.0, E1, default_grid()))
    assert a == pytest.approx(0.0, abs=0.01) and nu == 0
    with pytest.raises(InsufficientData):
        estimate_growth(evolve(J2, 0.0, E2, default_grid(t_max=5.0)))


def test_gamma_residual_examples():
    p = asymptotic_profile(J2, E2)
    res = [gamma_residual(J2, p, E2, t).residual for t in (10.0, 20.0, 40.0)]
    # x(t) t^-1 e^-2t = e1 + e2 / t exactly
    assert res == pytest.approx([0.1, 0.05, 0.025], rel=1e-8)
    A = np.diag([1.0, 0.5])
    p = asymptotic_profile(A, np.ones(2))
    for t in (5.0, 10.0, 20.0):
        assert gamma_residual(A, p, np.ones(2), t).residual == pytest.approx(math.exp(-0.5 * t), rel=1e-6)
    B = np.array([[2.0, 1.0], [1.0, 2.0]])
    p = asymptotic_profile(B, np.ones(2))
    assert gamma_residual(B, p, np.ones(2), 7.0).residual < 1e-12
    assert gamma_residual(B, p, np.ones(2), 7.0).ode_ok


def test_gamma_never_vanishes():
    A = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    p = asymptotic_profile(A, np.array([1.0, 0.5, 1.0]))
    beta = min(abs(t.beta) for t in p.terms if t.beta) if any(t.beta for t in p.terms) else 1.0
    ts = np.linspace(0, 4 * math.pi / beta, 2000)
    assert min(np.linalg.norm(p.gamma(t)) for t in ts) > 0


def test_profile_of_positive_flow_stays_in_cone():
    B = np.array([[1.0, 2.0, 0.5], [0.3, 1.0, 1.0], [1.0, 0.2, 1.0]])
    p = asymptotic_profile(complexify(B), np.ones(3))
    K = Complexified(Orthant(3))
    for t in np.linspace(0, 10, 50):
        assert K.violation(p.gamma(t)) <= 1e-8


def test_csv_format():
    traj = evolve(np.zeros((2, 2)), 0.0, E1, [0.5, 1.0])
    text = trajectory_csv(traj)
    lines = text.splitlines()
    assert lines[0] == "t,re_0,im_0,re_1,im_1,log_norm"
    assert lines[1].split(",")[0] == "0.5"
    assert text.endswith("\n") and "\r" not in text
