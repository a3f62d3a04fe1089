import json
import shutil
import subprocess
import sys

import pytest

from anticyc import __version__
from anticyc.cli import character_from_spec, main, parse_character_spec
from anticyc.errors import SchemaError

SPEC_TEXT = "chi = {field: -7, type: [2,0], finite: [[0, 1, 10]], modulus: {c: 1, p: 11, s: 1}}"


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, json.loads(captured.out), captured.err


def test_classgroup_example(capsys):
    code, rep, _ = run(["classgroup", "--disc", "-23"], capsys)
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["size"] == 3
    assert rep["version"] == __version__ and rep["config"]["disc"] == -23


def test_classgroup_with_formula(capsys):
    code, rep, _ = run(["classgroup", "--field", "-7", "--p", "11", "--n", "1"], capsys)
    assert code == 0
    assert rep["result"]["size"] == rep["result"]["formula"] == 10 and rep["result"]["formula_agrees"]


def test_measure_selftest(capsys):
    code, rep, _ = run(["measure-selftest", "--p", "3", "--prec", "8", "--count", "4"], capsys)
    assert code == 0 and rep["result"]["ok"]
    assert rep["config"]["Mp"] == 8 and rep["config"]["bounds"] == {"count": 4}


def test_chars_listing(capsys):
    code, rep, _ = run(["chars", "--field", "-7", "--p", "11", "--s", "1"], capsys)
    assert code == 0
    rows = rep["result"]["characters"]
    assert rep["result"]["group_size"] == len(rows) == 10
    assert sum(r["conductor"] == 11 for r in rows) == 9


def test_hecke_report(capsys):
    code, rep, _ = run(["hecke", "--field", "-7", "--trunc", "300"], capsys)
    assert code == 0
    res = rep["result"]
    assert res["form"]["level"] == 11 and res["form"]["truncation"] == 300
    assert res["lambda"]["type"] == [2, 0]


def test_euler_check_command(capsys):
    code, rep, _ = run(["euler-check", "--field", "-7", "--p", "11", "--trunc", "2000", "--digits", "40",
                        "--m", "1"], capsys)
    assert code == 0 and rep["result"]["exponent_shift"] == 0
    assert all(float(r["rel_err"]) < 1e-30 for r in rep["result"]["checks"])


def test_period_sum_with_char_file(capsys, tmp_path):
    path = tmp_path / "chi.txt"
    path.write_text(SPEC_TEXT)
    code, rep, _ = run(["period-sum", "--field", "-7", "--p", "11", "--s", "1", "--char", str(path),
                        "--digits", "25"], capsys)
    assert code == 0
    assert rep["result"]["class_number"] == 10 and len(rep["result"]["periods"]) == 1


def test_interpolate_single_character(capsys, tmp_path):
    path = tmp_path / "chi.txt"
    path.write_text(SPEC_TEXT)
    code, rep, _ = run(["interpolate", "--field", "-7", "--p", "11", "--s", "1", "--m", "0", "--form",
                        "level11.json", "--char", str(path)], capsys)
    assert code == 0
    res = rep["result"]
    assert res["L_value_flag"] == "NOT-RIGOROUS" and res["count"] == 1
    row = res["reports"][0]
    assert row["flags"]["L_value"] == "NOT-RIGOROUS"
    assert row["abs_ratio"]["re"].startswith("4.68037")


def test_report_is_byte_stable(tmp_path):
    out = tmp_path / "report.json"
    outs = []
    for _ in range(2):
        assert main(["constants", "--field", "-7", "--p", "11", "--s", "1", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["config"]["paths"]["out"] == str(out)


@pytest.mark.parametrize("argv,flag", [
    (["classgroup", "--bogus", "3"], "--bogus"),
    (["classgroup", "--disc", "minus"], "--disc"),
    (["period-sum", "--field", "-7"], "--p"),
    (["classgroup", "--digits", "-1"], "--digits"),
    (["hecke", "--form", "/nonexistent/form.json"], "--form"),
    (["period-sum", "--field", "-7", "--p", "11", "--char", "/nonexistent/chi"], "--char"),
])
def test_usage_errors_echo_flag(capsys, argv, flag):
    code = main(argv)
    captured = capsys.readouterr()
    assert code == 2
    assert flag in captured.err
    assert json.loads(captured.out)["status"] == "usage-error"


def test_missing_subcommand(capsys):
    assert main([]) == 2


def test_bad_seed(capsys, monkeypatch):
    monkeypatch.setenv("ANTICYC_SEED", "x")
    assert main(["classgroup"]) == 2
    assert "ANTICYC_SEED" in capsys.readouterr().err


@pytest.mark.parametrize("argv,name", [
    (["classgroup", "--field", "-7", "--p", "7"], "NonSplitPrime"),
    (["euler-check", "--field", "-4", "--p", "7"], "NonSplitPrime"),
    (["constants", "--field", "-7", "--p", "11", "--s", "1", "--form", "level11.json", "--m", "0",
      "--trunc", "30", "--c", "1", "--digits", "20"], None),
])
def test_domain_errors(capsys, argv, name):
    code, rep, _ = run(argv, capsys)
    if name is None:
        assert code == 0
        return
    assert code == 1 and rep["status"] == "error" and rep["error"]["error"] == name


def test_conductor_gap_exit(capsys, tmp_path, level11):
    from anticyc.qexp import eigenform_to_json
    rec = eigenform_to_json(level11)
    rec["coefficients"] = rec["coefficients"][:60]
    rec["level"] = 121
    path = tmp_path / "level121.json"
    path.write_text(json.dumps(rec))
    code, rep, _ = run(["interpolate", "--field", "-7", "--p", "11", "--s", "1", "--form", str(path)], capsys)
    assert code == 1 and rep["error"]["error"] == "ConductorGap"
    assert "reports" not in json.dumps(rep)


def test_schema_error_in_char_file(capsys, tmp_path):
    path = tmp_path / "chi.txt"
    path.write_text("chi = {field: -7, finite: [[0, 1, 3]], modulus: {c: 1, p: 11, s: 1}}")
    code, rep, _ = run(["period-sum", "--field", "-7", "--p", "11", "--s", "1", "--char", str(path)], capsys)
    assert code == 1 and rep["error"]["error"] == "SchemaError"


def test_character_spec_formats():
    a = parse_character_spec(SPEC_TEXT)
    b = parse_character_spec(json.dumps({"field": -7, "type": [2, 0], "finite": [[0, 1, 10]],
                                         "modulus": {"c": 1, "p": 11, "s": 1}}))
    assert a == b
    assert (a["c"], a["p"], a["s"]) == (1, 11, 1)
    chi = character_from_spec(a)
    assert chi.order == 10 and chi.conductor == 11


@pytest.mark.parametrize("text", [
    "chi = {field: -7, finite: [[0, 1, 10]]}",
    "chi = {field: -7, finite: [[0, 1]], modulus: {c: 1, p: 11, s: 1}}",
    "chi = {field: -7, finite: [[0, 1, 10]], modulus: {c: 1, p: 11}}",
    "chi = {field: -7, finite: [[0, 1, 10]",
])
def test_character_spec_rejects(text):
    with pytest.raises(SchemaError):
        parse_character_spec(text)


@pytest.mark.parametrize("finite", [[[3, 1, 10]], [[0, 1, 3]]])
def test_character_spec_range_checks(finite):
    spec = parse_character_spec(json.dumps({"field": -7, "finite": finite, "modulus": {"c": 1, "p": 11, "s": 1}}))
    with pytest.raises(SchemaError):
        character_from_spec(spec)


def test_console_script():
    exe = shutil.which("anticyc")
    cmd = [exe] if exe else [sys.executable, "-m", "anticyc.cli"]
    proc = subprocess.run(cmd + ["classgroup", "--disc", "-4"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["size"] == 1
