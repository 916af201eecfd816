import json
import os
import subprocess
import sys

import pytest

import wittsen.targets as targets
from wittsen.cli import RunConfig, build_full_report, main


def run_main(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


# ---------------------------------------------------------------------------
# exit codes and flags

def test_gabber_pass(capsys):
    code, out = run_main(["witt", "gabber", "-p", "3", "-L", "5"], capsys)
    assert code == 0
    assert "witt.gabber" in out and "pass" in out


def test_usage_error_nonprime():
    with pytest.raises(SystemExit) as e:
        main(["witt", "gabber", "-p", "4"])
    assert e.value.code == 2


def test_usage_error_bad_flag():
    with pytest.raises(SystemExit) as e:
        main(["witt", "gabber", "--no-such-flag"])
    assert e.value.code == 2


def test_zpn_p2_skipped(capsys):
    code, out = run_main(["sen", "zpn", "-p", "2"], capsys)
    assert code == 0
    assert "skipped" in out


def test_solve_frobenius_failure_reported_as_pass(capsys):
    code, out = run_main(["witt", "solve-frobenius", "-p", "2"], capsys)
    assert code == 0


def test_psi_values(capsys):
    code, out = run_main(
        ["cartier", "psi", "-p", "2", "-n", "3", "-m", "3", "--json"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["checks"][0]["payload"]["psi"] == [3, -3, -24]


def test_psi_zero(capsys):
    code, out = run_main(
        ["cartier", "psi", "-p", "2", "-n", "2", "-m", "0", "--json"], capsys
    )
    doc = json.loads(out)
    assert doc["checks"][0]["payload"]["psi"] == [0, 0]


def test_nseries_additive(capsys):
    code, out = run_main(
        ["fgl", "nseries", "--kind", "additive", "-m", "7", "--json"], capsys
    )
    doc = json.loads(out)
    assert doc["checks"][0]["payload"]["series"] == "7*x"


def test_dvr_flag_parsing(capsys):
    code, out = run_main(
        ["sen", "dvr", "-p", "3", "-E", "1,0,-3", "--json"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["checks"][0]["status"] == "pass"


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, _ = run_main(["witt", "dwork", "--json", "-o", str(path)], capsys)
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["checks"][0]["name"] == "witt.dwork"


# ---------------------------------------------------------------------------
# config file precedence

def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("p = 5\nL = 4  # comment\n")
    code, out = run_main(
        ["witt", "gabber", "--config", str(cfgfile), "--json"], capsys
    )
    doc = json.loads(out)
    assert doc["config"]["p"] == 5 and doc["config"]["L"] == 4
    code, out = run_main(
        ["witt", "gabber", "--config", str(cfgfile), "-p", "2", "--json"], capsys
    )
    doc = json.loads(out)
    assert doc["config"]["p"] == 2 and doc["config"]["L"] == 4


# ---------------------------------------------------------------------------
# full report

def test_report_is_deterministic_and_green():
    doc1 = build_full_report(RunConfig())
    doc2 = build_full_report(RunConfig())
    s1 = json.dumps(doc1, indent=2, sort_keys=True)
    s2 = json.dumps(doc2, indent=2, sort_keys=True)
    assert s1 == s2
    assert all(row["status"] != "fail" for row in doc1["checks"])


def test_report_matches_golden_file():
    golden = os.path.join(os.path.dirname(__file__), "data", "golden_report.json")
    with open(golden, "rb") as fh:
        expected = fh.read()
    doc = build_full_report(RunConfig())
    got = (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()
    assert got == expected


def test_tampered_target_fails(capsys, monkeypatch):
    monkeypatch.setitem(targets.FROBENIUS_PREIMAGE_FAIL_WITNESS, "rhs_balanced", 17)
    code, out = run_main(["witt", "solve-frobenius", "--json"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["checks"][0]["status"] == "fail"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wittsen.cli", "witt", "gabber", "-L", "4"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "pass" in proc.stdout
