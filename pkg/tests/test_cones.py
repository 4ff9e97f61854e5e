import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conespec.cones import (
    Complexified,
    DecompositionSpec,
    Generated,
    Orthant,
    Polyhedral,
    Transformed,
    arc_feasible,
    circle_align,
    cone_meets_subspace,
    find_proper_subcone,
    lp_feasible,
    lp_pointed,
    projectively_proper,
)
from conespec.errors import DimensionMismatch, InvalidCone, NotSolid, RepresentationMissing
from conespec.linalg import SubspaceBasis, distance_to_subspace, projective_angle
from conespec.positivity import cone_samples
from conespec.rng import stream

C2 = Complexified(Orthant(2))
WEDGE = Polyhedral(H=np.array([[1.0, 1.0], [1.0, -1.0]]))  # x1 >= |x2|


def test_membership_examples():
    assert Orthant(2).member(np.array([1.0, 0.0]))
    assert C2.member(np.array([1 + 1j, 2]))
    assert not C2.member(np.array([1 - 1j, 2]))
    assert WEDGE.member(np.array([1.0, 0.5]))
    assert not WEDGE.member(np.array([0.4, 1.0]))
    with pytest.raises(DimensionMismatch):
        Orthant(2).member(np.ones(3))


def test_interior_examples():
    assert C2.interior_member(np.array([1 + 1j, 2 + 3j]), 1e-9)
    assert not C2.interior_member(np.array([1, 2 + 3j]), 1e-9)
    T = Transformed(2 * np.eye(2), C2)
    for x in (np.array([1 + 1j, 2 + 3j]), np.array([1, 2 + 3j]), np.array([-1, 1j])):
        assert T.interior_member(x) == C2.interior_member(x / 2)


def test_not_solid_without_interior():
    ray = Generated(np.array([[1.0], [0.0]]))
    with pytest.raises(NotSolid):
        ray.interior_member(np.array([1.0, 0.0]))


def test_polyhedral_checks():
    with pytest.raises(InvalidCone):
        Polyhedral(G=np.array([[1.0, -1.0], [0.0, 0.0]]))  # a full line
    with pytest.raises(InvalidCone):
        Polyhedral(G=np.array([[1.0], [0.0]]), H=np.array([[-1.0, 0.0]]))
    assert WEDGE.has_generators  # enumerated in low dimension


def test_transformed_condition_cap():
    with pytest.raises(InvalidCone):
        Transformed(np.diag([1.0, 1e-12]), C2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-3, 10))
def test_membership_is_homogeneous(seed, s):
    rng = stream(seed, 3)
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    for K in (C2, WEDGE, Orthant(2)):
        assert K.member(x) == K.member(s * x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_sum_of_members_is_member(seed):
    for K in (C2, WEDGE, Transformed(np.array([[1, 0.3j], [0.2, 1]]), C2)):
        pts = cone_samples(K, 12, seed)
        i, j = stream(seed, 5).integers(pts.shape[1], size=2)
        assert K.member(pts[:, i] + pts[:, j])


def test_arc_examples():
    arcs = arc_feasible([1 + 1j])
    assert arcs.span == pytest.approx((-math.pi / 4, math.pi / 4))
    assert arc_feasible([1, 1j]).is_empty
    assert arc_feasible([]).measure == pytest.approx(2 * math.pi)
    assert arc_feasible([0, 1]).is_empty
    assert arc_feasible([1, 1j], closed=True).span == pytest.approx((0.0, 0.0), abs=1e-15)


def test_arc_crossing_zero_contains_zero():
    arcs = arc_feasible([np.exp(0.3j)])
    assert arcs.contains(0.0)
    assert arcs.contains(2 * math.pi - 1e-9)
    assert not arcs.contains(math.pi)


def test_circle_align_examples():
    z = circle_align(1j * np.array([1.0, 1.0]), C2, closed=True)
    assert z == pytest.approx(-1j)
    assert circle_align(np.array([1.0, -1.0]), C2, closed=True) is None
    xi = np.array([1 + 0.5j, 0.8 + 0.9j])
    z = circle_align(xi, C2, closed=False)
    assert z is not None and C2.interior_member(z * xi)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_circle_align_matches_grid(seed):
    rng = stream(seed, 6)
    xi = rng.normal(size=3) + 1j * rng.normal(size=3)
    K = Complexified(Orthant(3))
    z = circle_align(xi, K, closed=False)
    grid = np.exp(1j * np.linspace(0, 2 * math.pi, 10_000, endpoint=False))
    rot = grid[:, None] * xi[None, :]
    oracle = np.any(np.all((rot.real > 1e-9) & (rot.imag > 1e-9), axis=1))
    if z is not None:
        assert K.interior_member(z * xi, 0.0)
    else:
        assert not oracle


def test_lp_examples():
    x = lp_feasible(np.ones((1, 2)), [1.0], [True, True], np.ones(2))
    assert x is not None and np.all(x >= -1e-12) and x.sum() == pytest.approx(1.0)
    assert lp_feasible(np.array([[1.0]]), [-1.0], [True], np.array([1.0])) is None


def _pointed_by_vertices(G):
    """Exhaustive: pointed iff no subset of generators has a positive combination equal to zero."""
    import itertools

    k = G.shape[1]
    for size in range(1, k + 1):
        for S in itertools.combinations(range(k), size):
            sub = G[:, S]
            _, s, Vh = np.linalg.svd(sub)
            null = Vh[np.sum(s > 1e-10):]
            for v in null:
                if np.all(v > 1e-10) or np.all(v < -1e-10):
                    return False
    return True


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 3), st.integers(1, 4))
def test_pointedness_matches_enumeration(seed, n, k):
    G = np.round(stream(seed, 7).normal(size=(n, k)), 1)
    G = G[:, np.linalg.norm(G, axis=0) > 0]
    if G.shape[1] == 0:
        return
    assert lp_pointed(G) == _pointed_by_vertices(G)


def test_cone_meets_subspace_examples():
    M = SubspaceBasis.span([np.array([1.0, 1.0])])
    w = cone_meets_subspace(Orthant(2), M)
    assert w is not None and projective_angle(w, np.array([1.0, 1.0])) < 1e-9
    assert cone_meets_subspace(Orthant(2), SubspaceBasis.span([np.array([1.0, -1.0])])) is None
    assert cone_meets_subspace(WEDGE, SubspaceBasis.span([np.array([0.0, 1.0])])) is None


def test_cone_meets_subspace_needs_generators():
    from conespec.cones import Restricted

    K = Restricted(Complexified(Orthant(2)), SubspaceBasis.span([np.array([1.0, 1.0])]))
    with pytest.raises(RepresentationMissing):
        K.generators()


def test_projectively_proper_examples():
    D = DecompositionSpec.coordinate(3, [[0], [1], [2]])
    assert projectively_proper(Orthant(3), D).proper
    K = Polyhedral(G=np.array([[1.0, 1.0], [1.0, -1.0]]))
    v = projectively_proper(K, DecompositionSpec.coordinate(2, [[0], [1]]))
    assert v.per_index == (True, False)


def test_find_proper_subcone_examples():
    K = Polyhedral(G=np.array([[1.0, 1.0], [1.0, -1.0]]))
    idx, K0 = find_proper_subcone(K, DecompositionSpec.coordinate(2, [[0], [1]]))
    assert idx == (0,)
    (g,) = K0.generators().T
    assert projective_angle(g, np.array([1.0, 0.0])) < 1e-9
    idx, _ = find_proper_subcone(K, DecompositionSpec.coordinate(2, [[0, 1]]))
    assert idx == (0,)
    idx, _ = find_proper_subcone(Orthant(4), DecompositionSpec.coordinate(4, [[0, 2], [1], [3]]))
    assert idx == (0, 1, 2)


def test_points_near_a_missed_subspace_are_small():
    # the wedge meets span{e2} only at 0, so cone points close to it must be short
    M = SubspaceBasis.span([np.array([0.0, 1.0])])
    for eps in (1e-1, 1e-3, 1e-6):
        x = np.array([eps, eps])
        assert WEDGE.member(x)
        assert distance_to_subspace(x, M) == pytest.approx(eps)
        assert np.linalg.norm(x) <= 2 * eps
