import json
import subprocess
import sys

import pytest

from hodgewitt.cli import main, parse_window, UsageError
from hodgewitt.report import strip_timestamp


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_trace_example(capsys):
    code, out, _ = run(capsys, "trace", "--cover", "t = t'^2", "--form", "dlog(t')")
    assert code == 0 and out.strip() == "dlog(t)"


def test_trace_with_unit(capsys):
    code, out, _ = run(capsys, "trace", "--p", "2", "--n", "3", "--cover", "t = (1 + 2*s) * t'^2", "--form", "t'^2")
    assert code == 0 and out.strip() == "2*t^1 + 4*t^1*s^1"


def test_malformed_form(capsys):
    code, _, err = run(capsys, "trace", "--cover", "t = t'^2", "--form", "dlog(t'")
    assert code == 2 and "error" in err


def test_beta_examples(capsys):
    code, out, err = run(capsys, "beta", "--p", "2", "--n", "2", "--input", "t^2")
    assert code == 0 and out.strip() == "W(p=2,n=2)[t^2; 0]"
    assert "not closed" in err
    code, _, _ = run(capsys, "beta", "--p", "2", "--n", "2", "--input", "t^2", "--strict")
    assert code == 2
    code, out, _ = run(capsys, "beta", "--p", "2", "--n", "2", "--input", "t^4")
    assert code == 0 and out.strip() == "W(p=2,n=2)[t^4; 0]"
    code, _, _ = run(capsys, "beta", "--p", "2", "--n", "2", "--precision", "3", "--input", "t^4")
    assert code == 2


def test_filtration_example(capsys):
    code, out, _ = run(capsys, "filtration", "--p", "2", "--n", "1", "--i", "1", "--r", "1", "--window", "-6:6")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert set(doc) >= {"chart", "r", "variant", "generators", "memberships"}
    assert "dlog(t)" in doc["generators"]
    members = {m["class"]: m["member"] for m in doc["memberships"]}
    assert members["dlog(t)"] is True
    assert members["t^-2 * dlog(t)"] is False


def test_filtration_class_flag(capsys):
    code, out, _ = run(capsys, "filtration", "--p", "3", "--n", "1", "--vars", "t:log", "--r", "3/2",
                       "--class", "t^-3 * dlog(t)", "--class", "dlog(t)")
    doc = json.loads(out)
    assert [m["member"] for m in doc["memberships"]] == [True, True]
    code, out, _ = run(capsys, "filtration", "--p", "3", "--n", "1", "--vars", "t:log", "--r", "1",
                       "--class", "t^-3 * dlog(t)")
    assert json.loads(out)["memberships"][0]["member"] is False


def test_filtration_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["filtration", "--n", "1", "--r", "1"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err
    code, _, _ = run(capsys, "filtration", "--p", "2", "--r", "-1")
    assert code == 2
    code, _, _ = run(capsys, "filtration", "--p", "2", "--r", "1", "--window", "3:1")
    assert code == 2


def test_env_override(capsys, monkeypatch):
    monkeypatch.setenv("HODGEWITT_P", "3")
    monkeypatch.setenv("HODGEWITT_VARS", "t:log")
    code, out, _ = run(capsys, "filtration", "--n", "1", "--r", "1", "--i", "0", "--window", "-3:3")
    assert code == 0
    doc = json.loads(out)
    assert doc["chart"]["p"] == 3 and doc["chart"]["vars"] == "t:log"
    assert doc["generators"] == ["1", "t^3"]


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "homotopy", "--p", "3", "--n", "1", "--seed", "7", "--jobs", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["failed"] == 0 and doc["summary"]["total"] > 0
    code, out, _ = run(capsys, "verify", "ceiling", "--trials", "10000")
    assert code == 0
    code, _, _ = run(capsys, "verify", "nosuch")
    assert code == 2


def test_verify_reports_cases(capsys):
    code, out, _ = run(capsys, "verify", "witt-equiv", "--p", "3", "--n", "2", "--trials", "5", "--seed", "3")
    doc = json.loads(out)
    cases = doc["cases"]
    assert len(cases) == 5 and all("b" in c["inputs"] for c in cases)


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path, jobs in ((a, "1"), (b, "2")):
        assert main(["verify", "lift-indep", "--p", "2", "--trials", "3", "--seed", "9", "--window", "-4:4",
                     "--jobs", jobs, "--out", str(path)]) == 0
    assert strip_timestamp(a.read_text()) == strip_timestamp(b.read_text())


def test_parse_window():
    assert parse_window("-6:6") == ((-6, 6),)
    assert parse_window("-6:6,0:3") == ((-6, 6), (0, 3))
    with pytest.raises(UsageError):
        parse_window("6")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hodgewitt", "trace", "--cover", "t = t'^3", "--form", "t'^3 + t'"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "3*t^1"
