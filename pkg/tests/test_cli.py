import json
import subprocess
import sys

import numpy as np
import pytest

from xxzcorr.cli import main, read_state, state_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_exits_cleanly():
    proc = subprocess.run([sys.executable, "-m", "xxzcorr", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "thermal" in proc.stdout


def test_thermal_point_both_engines(capsys):
    code, out, _ = run(capsys, "thermal", "-J", "1", "-Jz", "-0.5", "-B", "0", "-D", "0", "-T", "0.5",
                       "--engine", "both", "--format", "json")
    assert code == 0
    (rec,) = json.loads(out)
    for q in ("C", "CC", "QD", "GMD2"):
        assert rec[f"{q}_delta"] < 1e-9


def test_dynamics_point_has_eight_values_and_four_deltas(capsys):
    code, out, _ = run(capsys, "dynamics", "-J", "1", "-D", "0.4", "--gamma", "1", "-t", "1",
                       "--initial", "psi1", "--engine", "both", "--format", "json")
    assert code == 0
    (rec,) = json.loads(out)
    assert sum(k.endswith(("_closedform", "_oracle")) for k in rec) == 8
    assert sum(k.endswith("_delta") for k in rec) == 4
    assert rec["CC_delta"] < 1e-9


def test_infinite_temperature(capsys):
    code, out, _ = run(capsys, "thermal", "-J", "1", "-Jz", "0", "-B", "0", "-D", "0", "-T", "1e6", "--format", "json")
    (rec,) = json.loads(out)
    assert code == 0 and max(rec[q] for q in ("C", "CC", "QD", "GMD2")) < 1e-6


def test_ground_state_defaults_to_oracle(capsys):
    code, out, _ = run(capsys, "thermal", "-J", "1", "--ground-state", "--format", "json")
    (rec,) = json.loads(out)
    assert code == 0
    assert rec["C"] == pytest.approx(1, abs=1e-6) and rec["QD"] == pytest.approx(1, abs=1e-6)


def test_sweep_to_file(tmp_path, capsys):
    path = tmp_path / "fig2.csv"
    code, out, _ = run(capsys, "figure", "fig2", "--resolution", "5", "--format", "csv", "-o", str(path))
    assert code == 0 and out == ""
    lines = path.read_text().splitlines()
    assert lines[0].startswith("panel,J,Jz") and len(lines) == 6


def test_two_axis_sweep(capsys):
    code, out, _ = run(capsys, "thermal", "-J", "1", "-T", "0.5", "--axis", "Jz:-1:1:3", "--axis", "B:0:1:2")
    assert code == 0 and len(out.splitlines()) == 7


def test_dump_and_reload_state(tmp_path, capsys):
    path = tmp_path / "rho.json"
    code, first, _ = run(capsys, "measures", "-J", "1", "-D", "0.3", "-B", "0.2", "-T", "0.4", "--dump-state", str(path))
    assert code == 0
    code, second, _ = run(capsys, "measures", "--state-file", str(path))
    assert code == 0
    a = np.array(first.splitlines()[1].split(","), float)
    b = np.array(second.splitlines()[1].split(","), float)
    assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_state_file_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(3)
    psi = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    rho = psi @ psi.conj().T
    rho /= np.trace(rho).real
    path = tmp_path / "s.json"
    path.write_text(state_json(rho))
    assert np.allclose(read_state(str(path)), rho, atol=1e-15)


def test_evolved_arbitrary_initial_state(tmp_path, capsys):
    path = tmp_path / "mixed.json"
    path.write_text(state_json(np.eye(4) / 4))
    code, out, _ = run(capsys, "dynamics", "-J", "1", "--gamma", "1", "-t", "1", "--initial", str(path))
    assert code == 0 and "QD" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["thermal", "-T", "0"],
        ["thermal", "-J", "1"],
        ["dynamics", "--gamma", "1", "-t", "1"],
        ["thermal", "-T", "1", "--axis", "J:0:1:2", "--axis", "B:0:1:2", "--axis", "D:0:1:2"],
        ["thermal", "-T", "1", "--axis", "J:0:1"],
        ["measures", "--state-file", "/nonexistent/rho.json"],
        ["measures"],
    ],
)
def test_errors_go_to_stderr(argv, capsys):
    code, out, err = run(capsys, *argv)
    assert code != 0 and out == "" and "error" in err


def test_bad_state_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 4, "entries": [[1, 0]] * 16}))
    code, out, err = run(capsys, "measures", "--state-file", str(path))
    assert code == 1 and "Hermitian" not in out and "error" in err
    path.write_text("{")
    assert run(capsys, "measures", "--state-file", str(path))[0] == 1


@pytest.mark.parametrize("argv", [["bogus"], ["thermal", "--bogus", "1"], ["thermal", "-J", "abc"], ["thermal", "-J"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code != 0


def test_no_partial_file_on_failure(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, _, _ = run(capsys, "thermal", "-T", "-1", "-o", str(path))
    assert code != 0 and not path.exists()


def test_byte_identical_runs():
    cmd = [sys.executable, "-m", "xxzcorr", "figure", "fig6", "--resolution", "4", "--engine", "both"]
    a = subprocess.run(cmd, capture_output=True).stdout
    b = subprocess.run(cmd, capture_output=True).stdout
    assert a == b and len(a) > 0


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert report["psi1"]["verdicts"]["CC"] == "agrees"
