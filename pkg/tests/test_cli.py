import io
import json
import subprocess
import sys

import numpy as np
import pytest

from conespec import cli
from conespec.cones import Complexified, Orthant
from conespec.families import FAMILIES, generate
from conespec.reports import analyze_instance
from conespec.serialize import Instance, canonical_dumps, dump_instance, load_instance


def write_instance(path, A, cone):
    path.write_text(json.dumps({"matrix": [[[float(np.real(z)), float(np.imag(z))] for z in row] for row in A],
                                "cone": cone}))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


ORTHANT2 = {"type": "orthant", "dim": 2}
COMPLEX2 = {"type": "complexified", "base": ORTHANT2}


def test_analyze_small_instance(tmp_path, capsys):
    path = write_instance(tmp_path / "a.json", [[2, 1], [1, 2]], ORTHANT2)
    code, out, _ = run(["analyze", path], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["spectral_radius"] == pytest.approx(3.0)
    assert rep["positivity"]["verdict"] == "Certified"
    assert rep["dominant_pair"]["r"] == pytest.approx(3.0)
    assert set(rep) >= {"input_digest", "positivity", "spectrum", "tolerances", "tool_version"}


def test_analyze_rejects_bad_input(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"matrix": [[[1, 0], [2, 0]]], "cone": ORTHANT2}))
    assert run(["analyze", str(path)], capsys)[0] == 2
    path.write_text('{"matrix": [[[1, 0]]],\n  "cone": }')
    code, _, err = run(["analyze", str(path)], capsys)
    assert code == 2 and "line 2" in err
    path.write_text(json.dumps({"matrix": [[[1, 0]]], "cone": {"type": "orthant", "dim": 1}, "extra": 1}))
    assert run(["analyze", str(path)], capsys)[0] == 2
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_analyze_matches_library(tmp_path, capsys):
    inst = generate("strictly-positive", 8, 5)
    path = tmp_path / "g.json"
    path.write_text(dump_instance(inst))
    code, out, _ = run(["analyze", str(path)], capsys)
    assert code == 0
    assert out == canonical_dumps(analyze_instance(load_instance(path.read_text())))


def test_analyze_from_stdin(tmp_path, monkeypatch, capsys):
    text = dump_instance(generate("positive", 3, 1))
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code, out, _ = run(["analyze", "-"], capsys)
    assert code == 0 and json.loads(out)["input_digest"] == load_instance(text).digest


def test_certify_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(dump_instance(generate("complexified", 4, 2)))
    assert run(["certify", str(good)], capsys)[0] == 0
    ident = write_instance(tmp_path / "id.json", np.eye(2), COMPLEX2)
    code, out, _ = run(["certify", ident, "--strict"], capsys)
    assert code == 1
    gap = [a for a in json.loads(out)["assertions"] if a["name"] == "spectral_gap"][0]
    assert gap["verdict"] == "Fail"
    diag = write_instance(tmp_path / "d.json", np.diag([3, 0.5]), ORTHANT2)
    code, out, _ = run(["certify", diag, "--check", "split", "--rho", "0.5"], capsys)
    assert code == 0 and json.loads(out)["split_dims"] == [1, 1]
    assert run(["certify", diag, "--check", "split"], capsys)[0] == 2
    # 0.5 / 3 of the spectral radius lands on the eigenvalue 0.5
    assert run(["certify", diag, "--check", "split", "--rho", str(0.5 / 3)], capsys)[0] == 3


def test_certify_undecided_under_strict(tmp_path, capsys):
    # a generic operator on a transformed cone cannot be certified by probing alone
    A = np.array([[2.0, 0.1], [0.1, 1.0]])
    path = write_instance(tmp_path / "u.json", A, {
        "type": "transformed", "T": [[[1, 0], [0.2, 0.1]], [[0, 0], [1, 0]]], "base": COMPLEX2})
    code, out, _ = run(["certify", path], capsys)
    rep = json.loads(out)
    undecided = rep["positivity"]["rotational"]["verdict"] == "Undecided"
    if code == 0 and undecided:
        assert run(["certify", path, "--strict"], capsys)[0] == 4


def test_certify_real_check(tmp_path, capsys):
    path = write_instance(tmp_path / "r.json", [[2, 1], [1, 2]], ORTHANT2)
    code, out, _ = run(["certify", path, "--check", "real"], capsys)
    assert code == 0
    names = [a["name"] for a in json.loads(out)["assertions"]]
    assert "simple_dominant" in names


def test_flow_outputs(tmp_path, capsys):
    path = tmp_path / "j.json"
    path.write_text(dump_instance(generate("jordan", 2, 0)))
    csv_path = tmp_path / "j.csv"
    code, out, _ = run(["flow", str(path), "--x0", "[0, 1]", "--csv", str(csv_path)], capsys)
    assert code == 0
    fields = dict(part.split("=") for part in out.split()[1:] if "=" in part)
    assert float(fields["alpha_hat"]) == pytest.approx(2.0, abs=0.01)
    assert fields["nu_hat"] == "1"
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 201 and lines[0].endswith("cone_violation,violation_count")
    assert all(line.split(",")[-1] == "0" for line in lines[1:])

    zero = write_instance(tmp_path / "z.json", np.zeros((2, 2)), ORTHANT2)
    code, out, _ = run(["flow", zero], capsys)
    rows = [line.split(",")[1:5] for line in out.splitlines()[1:]]
    assert code == 0 and all(r == rows[0] for r in rows)

    code, _, _ = run(["flow", zero, "--x0", "[-1, 0]"], capsys)
    assert code == 2
    assert run(["flow", zero, "--x0", "[-1, 0]", "--unchecked"], capsys)[0] == 0


def test_gen(tmp_path, capsys):
    a = run(["gen", "--family", "strictly-positive", "--n", "4", "--seed", "7"], capsys)[1]
    b = run(["gen", "--family", "strictly-positive", "--n", "4", "--seed", "7"], capsys)[1]
    assert a == b
    A = load_instance(a).matrix
    assert np.all((A.real >= 0.1) & (A.real <= 1.0)) and not A.imag.any()
    jordan = load_instance(run(["gen", "--family", "jordan", "--n", "3"], capsys)[1])
    from conespec.linalg import eigen_spectrum

    ranks = [ch.rank for c in eigen_spectrum(jordan.matrix).clusters for ch in c.chains]
    assert sorted(ranks) == [1, 2]
    t = load_instance(run(["gen", "--family", "transformed", "--n", "5", "--seed", "1"], capsys)[1])
    assert np.linalg.cond(t.cone.T) <= 1e3
    assert run(["gen", "--family", "nope", "--n", "3"], capsys)[0] == 2
    assert run(["gen", "--family", "positive", "--n", "500"], capsys)[0] == 2


def test_search(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = run(["search", "--family", "complexified", "--n-range", "2..6", "--seeds", "50",
                      "--out", str(out)], capsys)
    res = json.loads(out.read_text())
    assert code == 0 and res["findings"] == [] and res["complete"]
    out2 = tmp_path / "t.json"
    run(["search", "--family", "transformed", "--n-range", "3..4", "--seeds", "20", "--out", str(out2)], capsys)
    res = json.loads(out2.read_text())
    assert sum(res["histogram"].values()) == res["included"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "conespec", "gen", "--family", "positive", "--n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and load_instance(proc.stdout).cone.dim == 2


def test_tolerance_profile_from_environment(tmp_path, monkeypatch, capsys):
    path = write_instance(tmp_path / "a.json", [[2, 1], [1, 2]], ORTHANT2)
    monkeypatch.setenv("CONESPEC_TOLERANCE_PROFILE", "strict")
    rep = json.loads(run(["analyze", path], capsys)[1])
    assert rep["tolerances"]["probes"] == 1024
    monkeypatch.setenv("CONESPEC_TOLERANCE_PROFILE", "sloppy")
    assert run(["analyze", path], capsys)[0] == 2


@pytest.mark.parametrize("family", FAMILIES)
def test_round_trip(family):
    for n in (2, 5):
        inst = generate(family, n, 3)
        text = dump_instance(inst)
        back = load_instance(text)
        assert dump_instance(back) == text
        assert np.array_equal(back.matrix, inst.matrix)


def test_instance_overrides_tolerances():
    inst = Instance(np.eye(2, dtype=complex), Orthant(2), 1, {"tol_cone": 1e-7})
    back = load_instance(dump_instance(inst))
    assert back.tolerance_profile().tol_cone == 1e-7
    with pytest.raises(ValueError):
        load_instance(json.dumps({"matrix": [[[1, 0]]], "cone": {"type": "orthant", "dim": 1},
                                  "tolerances": {"no_such": 1}}))
