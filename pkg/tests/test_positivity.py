import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conespec.cones import Complexified, Orthant, Transformed
from conespec.errors import NotInCone
from conespec.positivity import (
    CERTIFIED,
    THEOREM_BACKED,
    UNDECIDED,
    VIOLATED,
    certify_positive,
    certify_rotational_strong_positivity,
    check_interior_mapping,
    complexify,
    cone_samples,
    decomplexify,
    rotational_strong_positivity_at,
)
from conespec.rng import stream

B2 = np.array([[2.0, 1.0], [1.0, 2.0]])
C2 = Complexified(Orthant(2))


def strictly_positive(seed, n):
    return stream(seed, 8).uniform(0.1, 1.0, size=(n, n))


def test_complexify_examples():
    A = complexify(B2)
    assert np.array_equal(A.real, B2) and not A.imag.any()
    e1 = np.array([1.0, 0.0])
    assert np.allclose(A @ (1j * e1), 1j * (B2 @ e1))


def test_complexify_keeps_the_spectrum():
    B = stream(4, 1).normal(size=(5, 5))
    got = np.sort_complex(np.linalg.eigvals(complexify(B)))
    want = np.sort_complex(np.linalg.eigvals(B))
    assert np.allclose(got, want)
    assert np.array_equal(decomplexify(complexify(B)), B)


def test_certify_positive_examples():
    assert certify_positive(complexify(B2), C2).verdict == CERTIFIED
    cert = certify_positive(complexify(B2) + 0.1j * np.eye(2), C2)
    assert cert.verdict == VIOLATED
    assert any(np.allclose(w.x, [1j, 0]) for w in cert.witnesses)
    B = np.array([[1.0, -0.5], [0.2, 1.0]])
    cert = certify_positive(B, Orthant(2))
    assert cert.verdict == VIOLATED
    assert np.allclose(cert.witnesses[0].x, [0.0, 1.0])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_positive_maps_conic_combinations_into_cone(seed):
    A = complexify(strictly_positive(seed, 4))
    K = Complexified(Orthant(4))
    assert certify_positive(A, K).verdict == CERTIFIED
    X = cone_samples(K, 1000, seed)
    viol = [K.violation(A @ X[:, j]) for j in range(X.shape[1])]
    assert max(viol) <= 10 * 1e-9


def test_rotation_at_a_point():
    z = rotational_strong_positivity_at(complexify(B2), C2, 1j * np.array([1.0, 1.0]))
    assert z is not None
    assert C2.interior_member(z * complexify(B2) @ (1j * np.ones(2)))
    # the documented choice z = (1 - i)/sqrt(2) works as well
    w = (1 - 1j) / math.sqrt(2) * (B2 @ (1j * np.ones(2)))
    assert C2.interior_member(w)
    assert rotational_strong_positivity_at(np.eye(2), C2, np.array([1, 1j])) is None
    with pytest.raises(NotInCone):
        rotational_strong_positivity_at(np.eye(2), C2, np.array([-1.0, 0.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_rotation_matches_grid(seed):
    rng = stream(seed, 2)
    A = complexify(strictly_positive(seed, 3))
    K = Complexified(Orthant(3))
    x = rng.uniform(0, 1, 3) + 1j * rng.uniform(0, 1, 3)
    z = rotational_strong_positivity_at(A, K, x)
    assert z is not None
    y = A @ x
    grid = np.exp(1j * np.linspace(0, 2 * math.pi, 4000, endpoint=False))
    rot = grid[:, None] * y[None, :]
    assert np.any(np.all((rot.real > 0) & (rot.imag > 0), axis=1))


def test_rotational_certificates():
    A = complexify(strictly_positive(1, 4))
    cert = certify_rotational_strong_positivity(A, Complexified(Orthant(4)))
    assert (cert.verdict, cert.method) == (CERTIFIED, THEOREM_BACKED)
    cert = certify_rotational_strong_positivity(complexify(np.eye(2)), C2)
    assert cert.verdict == VIOLATED
    assert any(np.allclose(w.x, [1, 1j]) for w in cert.witnesses)


def test_generic_operator_on_transformed_cone():
    rng = stream(12, 3)
    T = np.eye(3) + 0.2 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    cert = certify_rotational_strong_positivity(A, Transformed(T, Complexified(Orthant(3))), probes=64)
    assert cert.verdict in (UNDECIDED, VIOLATED)
    if cert.verdict == UNDECIDED:
        assert not cert.witnesses and cert.probes_used > 0
    else:
        assert cert.witnesses


def test_interior_mapping_examples():
    B = strictly_positive(2, 4)
    res = check_interior_mapping(complexify(B), Complexified(Orthant(4)))
    assert not res.holds
    assert np.allclose(res.witness, 1j * np.ones(4))
    assert check_interior_mapping(B, Orthant(4)).holds
    res = check_interior_mapping(np.zeros((2, 2)), C2)
    assert not res.holds and res.witness is not None


def test_structural_certificate_excludes_interior_mapping():
    for seed in range(10):
        A = complexify(strictly_positive(seed, 3))
        K = Complexified(Orthant(3))
        cert = certify_rotational_strong_positivity(A, K)
        if cert.method == THEOREM_BACKED:
            assert not check_interior_mapping(A, K, seed=seed).holds
