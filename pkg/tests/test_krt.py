import numpy as np
import pytest

from conespec.cones import Complexified, Orthant, Transformed
from conespec.errors import NotEigenvectors, NotPositive, SplitOnSpectrum
from conespec.families import generate
from conespec.krt import (
    certify_dominant,
    certify_real_cone,
    certify_split,
    extract_perron_pair,
    phase_family_probe,
    search_counterexample,
)
from conespec.linalg import eigen_spectrum, projective_angle
from conespec.positivity import complexify
from conespec.rng import stream

B2 = np.array([[2.0, 1.0], [1.0, 2.0]])
C2 = Complexified(Orthant(2))
ALL = ["dominant_pair", "spectral_gap", "no_other_cone_eigenvectors",
       "semisimple_dominant", "interior_dominant_eigenvectors"]


def verdicts(rep):
    return {a.name: a.verdict for a in rep.assertions}


def test_perron_pair_examples():
    p = extract_perron_pair(B2, Orthant(2))
    assert p.r == pytest.approx(3.0)
    assert projective_angle(p.w, np.ones(2)) < 1e-10
    p = extract_perron_pair(np.array([[1.0, 1.0], [0.0, 1.0]]), Orthant(2))
    assert p.r == pytest.approx(1.0)
    assert projective_angle(p.w, [1.0, 0.0]) < 1e-9


def test_perron_pair_matches_eigensolver():
    inst = generate("complexified", 8, 3)
    p = extract_perron_pair(inst.matrix, inst.cone)
    dom = eigen_spectrum(inst.matrix).dominant()
    assert abs(p.r - dom.eigenvalue.real) <= 1e-8 * p.r
    assert projective_angle(p.w, dom.eigenvectors()[0]) <= 1e-8
    assert inst.cone.member(p.w)


def test_non_positive_operator_is_refused():
    with pytest.raises(NotPositive):
        extract_perron_pair(np.array([[1.0, -1.0], [0.0, 1.0]]), Orthant(2))


def test_scale_equivariance():
    inst = generate("strictly-positive", 5, 2)
    p = extract_perron_pair(inst.matrix, inst.cone)
    q = extract_perron_pair(7.5 * inst.matrix, inst.cone)
    assert q.r == pytest.approx(7.5 * p.r, rel=1e-10)
    assert projective_angle(p.w, q.w) <= 1e-8


def test_flow_and_direct_agree():
    for seed in range(5):
        inst = generate("transformed", 4, seed)
        a = extract_perron_pair(inst.matrix, inst.cone)
        b = extract_perron_pair(inst.matrix, inst.cone, method="direct")
        assert abs(a.r - b.r) <= 1e-8 * a.r
        assert projective_angle(a.w, b.w) <= 1e-6


def test_dominant_certification_examples():
    rep = certify_dominant(complexify(B2), C2)
    assert set(verdicts(rep).values()) == {"Pass"}
    assert all(a.asserted for a in rep.assertions)
    rep = certify_dominant(complexify(np.eye(2)), C2)
    assert rep.positivity["rotational"]["verdict"] == "Violated"
    assert verdicts(rep)["spectral_gap"] == "Fail"
    assert not rep.assertion("spectral_gap").asserted
    inst = generate("complexified", 6, 9)
    rep = certify_dominant(inst.matrix, inst.cone)
    assert all(verdicts(rep)[name] == "Pass" for name in ALL)
    assert rep.spectrum["clusters"]
    r = rep.dominant["r"]
    moduli = sorted(abs(c["eigenvalue"]) for c in rep.spectrum["clusters"])
    assert moduli[-2] < r


def test_similarity_invariance():
    inst = generate("complexified", 4, 5)
    T = np.eye(4) + 0.3 * stream(5, 1).normal(size=(4, 4))
    A2 = T @ inst.matrix @ np.linalg.inv(T)
    a = verdicts(certify_dominant(inst.matrix, inst.cone))
    b = verdicts(certify_dominant(A2, Transformed(T, inst.cone)))
    assert a == b


def test_no_other_cone_eigenvector_agrees_with_direct_alignment():
    from conespec.cones import circle_align

    inst = generate("complexified", 5, 4)
    rep = certify_dominant(inst.matrix, inst.cone)
    assert rep.assertion("no_other_cone_eigenvectors").verdict == "Pass"
    spec = eigen_spectrum(inst.matrix)
    dom = spec.dominant()
    for c in spec.clusters:
        if c is dom:
            continue
        for ch in c.chains:
            for j in range(ch.rank):
                assert circle_align(ch.vectors[:, j], inst.cone, closed=True) is None


def test_split_examples():
    rep = certify_split(np.diag([3.0, 0.5]), Orthant(2), 1.0)
    assert rep.extra["split_dims"] == [1, 1]
    assert rep.dominant["r"] == pytest.approx(3.0)
    assert projective_angle(rep.dominant["w"], [1.0, 0.0]) < 1e-12
    assert not rep.any_fail
    inst = generate("complexified", 5, 1)
    r = eigen_spectrum(inst.matrix).spectral_radius
    rep = certify_split(inst.matrix, inst.cone, 0.999 * r)
    assert rep.extra["split_dims"][1] == 1
    assert rep.dominant["r"] == pytest.approx(r, rel=1e-10)
    with pytest.raises(SplitOnSpectrum):
        certify_split(np.diag([3.0, 0.5]), Orthant(2), 0.5)


def test_split_on_random_positive_instance():
    inst = generate("positive", 8, 4)
    r = eigen_spectrum(inst.matrix).spectral_radius
    rep = certify_split(inst.matrix, inst.cone, 0.5 * r)
    meets = rep.assertion("cone_meets_outer_subspace")
    assert meets.verdict == "Pass" and inst.cone.member(meets.evidence["witness"])
    full = certify_dominant(inst.matrix, inst.cone)
    assert rep.dominant["r"] == pytest.approx(full.dominant["r"], rel=1e-8)


def test_real_cone_examples():
    rep = certify_real_cone(B2, Orthant(2))
    v = verdicts(rep)
    assert v["simple_dominant"] == "Pass" and v["interior_real_eigenvector"] == "Pass"
    assert rep.dominant["r"] == pytest.approx(3.0)
    rep = certify_real_cone(np.eye(2), Orthant(2))
    assert not rep.assertion("simple_dominant").asserted
    assert rep.dominant["r"] == pytest.approx(1.0)
    B = stream(10, 1).uniform(0.1, 1.0, size=(10, 10))
    rep = certify_real_cone(B, Orthant(10))
    assert all(a.verdict == "Pass" for a in rep.assertions)


def test_phase_family_probe():
    xi, eta = np.ones(2), np.array([1.0, -1.0])
    probe = phase_family_probe(B2, C2, xi, eta, np.linspace(0, 2, 21))
    assert probe.feasible[0]
    lo, hi = probe.bracket
    assert lo == pytest.approx(1.0) and hi == pytest.approx(1.1)
    assert not phase_family_probe(B2, C2, xi, eta, [1e3]).feasible[0]
    with pytest.raises(NotEigenvectors):
        phase_family_probe(B2, C2, np.array([1.0, 0.0]), eta, [0.5])


def test_search_examples():
    res = search_counterexample("complexified", range(2, 9), range(100))
    assert res["findings"] == [] and res["excluded"] == 0
    assert res["histogram"] == {"1": 700}
    res = search_counterexample("reducible", [4, 6], range(10))
    assert res["included"] == 0 and res["excluded"] == 20
    res = search_counterexample("transformed", [3, 4], range(30))
    assert sum(res["histogram"].values()) == res["included"]
