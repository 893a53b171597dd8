import csv
import io
import json
import subprocess
import sys

import pytest

from quatquot.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "k3.json", "--json")
    assert code == 0
    assert json.loads(out) == []


def test_validate_non_strict_angles(capsys):
    code, out, _ = run(capsys, "validate", "bad_angles.json", "--json")
    assert code == 1
    issues = json.loads(out)
    assert [i["check"] for i in issues] == ["strictly_increasing"]
    assert set(issues[0]) == {"check", "index", "message"}


def test_validate_text_names_failing_check(capsys):
    code, out, _ = run(capsys, "validate", "nonconvex.json")
    assert code == 1
    assert "convex" in out


def test_malformed_json_pointer(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"lattice_data": [[1, 0], [0, 1.5], [-1, 1]], "conformal_angles": [0, 1, 2]}')
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert json.loads(err)["field"] == "lattice_data[1][1]"
    bad.write_text('{"lattice_data": ')
    code, _, err = run(capsys, "derive", str(bad))
    assert code == 2
    assert json.loads(err)["field"].startswith("line 1")


def test_missing_file_and_bad_usage(capsys):
    assert run(capsys, "derive", "nope.json")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2
    assert run(capsys, "derive", "k3.json", "--csv")[0] == 2
    assert run(capsys, "scan-transversality", "k3.json", "--grid", "-1")[0] == 2


def test_derive(capsys):
    code, out, _ = run(capsys, "derive", "k3.json", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["T"] == [[0, 1], [-1, 1], [-1, 0]]
    assert rep["kernel_basis"] == [[1, -1, 1]]
    assert rep["quotient_is_F"] is True
    assert rep["locally_free"] == "PASS" and rep["witnesses"] == []


def test_scan_json_and_csv(capsys):
    code, out, _ = run(capsys, "scan-transversality", "k4.json", "--grid", "10", "--json")
    rep = json.loads(out)
    assert code == 0
    assert {"min_abs_det", "sign_changes", "samples"} <= rep.keys() and rep["samples"] == 100
    code, out, _ = run(capsys, "scan-transversality", "nonconvex.json", "--grid", "10", "--csv")
    assert code == 1
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "y", "det"] and len(rows) == 101


def test_joyce_check(capsys):
    code, out, _ = run(capsys, "joyce-check", "k3.json", "--grid", "10", "--eps", "1e-3", "--json")
    rep = json.loads(out)
    assert code == 0
    assert len(rep["nondegeneracy"]["boundary"]) == 1
    assert rep["correspondence"]["mismatches"] == 0


def test_descend(capsys):
    code, out, _ = run(capsys, "descend", "k3.json", "--samples", "5", "--seed", "4", "--json")
    rep = json.loads(out)
    assert code == 0
    assert len(rep["samples"]) == 5
    assert set(rep["summary"]) >= {"max_residual", "skipped"}


def test_classify_and_deform(capsys):
    code, out, _ = run(capsys, "classify", "k3.json", "--samples", "20", "--json")
    assert code == 0 and json.loads(out)["real_structure"] == "antipodal"
    code, out, _ = run(capsys, "deform", "k3.json", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["tk_invariant_dim"] == 3 and rep["extra_dim"] == 6
    assert rep["extra_weights"] == [[1, 1, 0], [1, 0, -1], [0, 1, 1]]


def test_pipeline_deterministic(capsys):
    args = ("pipeline", "k3.json", "--grid", "12", "--samples", "10", "--json")
    code, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert code == 0 and out1 == out2
    rep = json.loads(out1)
    assert rep["verdict"] == "PASS"
    assert all(s["status"] == "PASS" for s in rep["stages"].values())


@pytest.mark.parametrize("name", ["nonconvex.json", "sublattice.json"])
def test_pipeline_failures(capsys, name):
    code, out, _ = run(capsys, "pipeline", name, "--grid", "12", "--samples", "10", "--json")
    rep = json.loads(out)
    assert code == 1 and rep["verdict"] == "FAIL"
    # the verdict is the conjunction of stage verdicts
    assert any(s["status"] == "FAIL" for s in rep["stages"].values())


def test_console_script_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "quatquot.cli", "derive", "k3.json", "--json"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["kernel_basis"] == [[1, -1, 1]]
