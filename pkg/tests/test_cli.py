import json
import subprocess
import sys

import numpy as np
import pytest

from posmaps.cli import main, parse_angle
from posmaps.interchange import matrix_to_doc, write_document

FAST = ["--starts", "3", "--probes", "500"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def structured(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "structured")
    assert code == 0, err
    return json.loads(out)


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.mark.parametrize("text, value", [("pi/3", np.pi / 3), ("-pi/3", -np.pi / 3), ("2*pi/3", 2 * np.pi / 3), ("1.5", 1.5)])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("text", ["import os", "pi/0", "e", "__import__('os')"])
def test_parse_angle_rejects(text):
    with pytest.raises(Exception):
        parse_angle(text)


def test_basis_command(capsys):
    doc = structured(capsys, "basis", "--n", "3")
    assert len(doc["generators"]) == 8
    d2 = np.array(doc["generators"][1]["entries"])[:, 0].reshape(3, 3)
    assert np.allclose(d2, np.diag([1, 1, -2]) / np.sqrt(6), atol=1e-15)
    assert len(structured(capsys, "basis", "--n", "2")["generators"]) == 3


def test_basis_bad_n(capsys):
    code, _, err = run(capsys, "basis", "--n", "1")
    assert code == 2 and "error" in err


def test_build_extreme_point_certificate(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", {"n": 3, "extreme": {"kappa": 1.0, "delta": 0.5, "seed": 4}})
    out = tmp_path / "map.json"
    code, _, _ = run(capsys, "build", spec, "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["certificate"] == pytest.approx(1.0, abs=1e-12)
    assert doc["provenance"] == "theorem1"


def test_build_non_contraction_exit_3(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", {"n": 2, "T": (2 * np.eye(3)).tolist(), "y": [0, 0, 0]})
    out = tmp_path / "map.json"
    code, _, err = run(capsys, "build", spec, "--out", out)
    assert code == 3
    assert "ball_max: 2" in err
    assert not out.exists()


def test_build_sample_spec(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", {"n": 2, "sample": {"seed": 3, "k": 2}})
    doc = structured(capsys, "build", spec)
    assert doc["certificate"] <= 1 + 1e-9


@pytest.mark.parametrize(
    "doc",
    [{"extreme": {"kappa": 1}}, {"n": 2}, {"n": 2, "T": [1, 2], "y": [0]}],
)
def test_build_bad_specs_exit_2(tmp_path, capsys, doc):
    spec = write_json(tmp_path / "spec.json", doc)
    assert run(capsys, "build", spec)[0] == 2


def test_build_missing_file_exit_2(tmp_path, capsys):
    assert run(capsys, "build", tmp_path / "nope.json")[0] == 2


def test_build_family_choi_rotation(capsys):
    doc = structured(capsys, "build", "--family", "choi-rotation", "--alpha", "1.0471975512")
    assert doc["member"] is True and doc["dim"] == 3
    doc = structured(capsys, "build", "--family", "choi-rotation", "--alpha", "pi/3")
    assert doc["ball_max"] == pytest.approx(1.0, abs=1e-12)


def test_build_other_families(capsys):
    assert structured(capsys, "build", "--family", "tau-k", "--n", "4", "--k", "2")["member"] is True
    doc = structured(capsys, "build", "--family", "p-family", "--p", "1", "1", "1", "1")
    assert doc["member"] is False
    doc = structured(capsys, "build", "--family", "witness-236", "--p", "2")
    assert doc["dim"] == 9
    assert run(capsys, "build", "--family", "p-family", "--p", "1", "0.9", "0.9", "0.9")[0] == 2
    assert run(capsys, "build", "--family", "phi-k", "--n", "3", "--k", "2")[0] == 2


def test_apply_case_i_to_e11(tmp_path, capsys):
    mp = tmp_path / "phi.json"
    run(capsys, "build", "--family", "choi-rotation", "--alpha", "pi/3", "--out", mp)
    e11 = np.zeros((3, 3))
    e11[0, 0] = 1
    mat = tmp_path / "e11.json"
    write_document(str(mat), matrix_to_doc(e11))
    doc = structured(capsys, "apply", mp, mat)
    out = np.array(doc["entries"])[:, 0].reshape(3, 3)
    assert np.allclose(out, np.diag([0.5, 0.5, 0]), atol=1e-12)


def test_apply_shape_mismatch_exit_2(tmp_path, capsys):
    mp = tmp_path / "phi.json"
    run(capsys, "build", "--family", "choi-rotation", "--alpha", "pi", "--out", mp)
    mat = tmp_path / "m.json"
    write_document(str(mat), matrix_to_doc(np.eye(2)))
    assert run(capsys, "apply", mp, mat)[0] == 2


def test_check_all_case_iii(tmp_path, capsys):
    mp = tmp_path / "phi.json"
    run(capsys, "build", "--family", "choi-rotation", "--alpha", "pi", "--out", mp)
    doc = structured(capsys, "check", mp, "--all", *FAST)
    verdicts = {r["check"]: r["verdict"] for r in doc["results"]}
    assert verdicts == {"cp": False, "ccp": True, "positive-evidence": "pass", "member": True}
    assert doc["seed"] == 0 and doc["config"]["starts"] == 3
    code, out, _ = run(capsys, "check", mp, "--cp")
    assert code == 0 and out.startswith("cp: false")


def test_check_is_byte_identical_for_same_seed(tmp_path, capsys):
    mp = tmp_path / "phi.json"
    run(capsys, "build", "--family", "tau-k", "--n", "3", "--k", "1", "--out", mp)
    a = run(capsys, "check", mp, "--positive", "--seed", "7", "--format", "structured", *FAST)[1]
    b = run(capsys, "check", mp, "--positive", "--seed", "7", "--format", "structured", *FAST)[1]
    assert a == b


def test_witness_command(capsys):
    doc = structured(capsys, "witness", "--alpha", "1.0472", "--p", "1", "--p", "2")
    v1, v2 = doc["results"]
    assert v1["verdict"] == "inconclusive" and abs(v1["min_eigenvalue"]) < 1e-9
    assert v2["verdict"] == "indecomposable" and v2["min_eigenvalue"] < 0
    doc = structured(capsys, "witness", "--alpha", "pi", "--p", "0.5", "2")
    assert all(r["verdict"] == "inconclusive" for r in doc["results"])


def test_witness_needs_m3(tmp_path, capsys):
    mp = tmp_path / "phi.json"
    run(capsys, "build", "--family", "tau-k", "--n", "4", "--k", "1", "--out", mp)
    assert run(capsys, "witness", mp)[0] == 2
    assert run(capsys, "witness")[0] == 2


def test_invalid_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", "x.json", "--starts", "0"])
    assert info.value.code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "posmaps.cli", "basis", "--n", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("3 generators of SU(2)")
