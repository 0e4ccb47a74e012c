import io
import json

import pytest

from helpers import callcc_derivation
from lammu.cli import main
from lammu.derivation import to_json

CONTROL = r"(\x. mu a.[a] x (\y. mu d.[a] y)) (\w.w) (\w.w)"
OMEGA = r"(\x.x x)(\x.x x)"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    return code, json.loads(out)


def test_parse_reports_free_identifiers(capsys):
    code, data = run_json(capsys, "parse", "-e", r"\x.mu a.[b] x y")
    assert code == 0
    assert data["free_vars"] == ["y"] and data["free_names"] == ["b"] and data["kind"] == "term"


def test_parse_reads_files_and_stdin(capsys, tmp_path, monkeypatch):
    f = tmp_path / "t.lm"
    f.write_text("x[x/y]\n")
    assert run(capsys, "parse", str(f))[1].strip() == "x[x/y]"
    monkeypatch.setattr("sys.stdin", io.StringIO("[a] x"))
    assert run(capsys, "parse", "-")[1].strip() == "[a] x"


def test_parse_error_is_a_usage_error(capsys):
    code, _, err = run(capsys, "parse", "-e", "(x")
    assert code == 2 and "line 1" in err


def test_missing_input_and_unknown_file(capsys, tmp_path):
    assert run(capsys, "parse")[0] == 2
    assert run(capsys, "parse", str(tmp_path / "missing"))[0] == 2


def test_bad_flag_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["reduce", "--strategy", "sideways", "-e", "x"])
    assert e.value.code == 2


def test_head_reduction_trace(capsys):
    code, data = run_json(capsys, "reduce", "--strategy", "head", "--trace", "-e", CONTROL)
    assert code == 0 and data["count"] == 5
    assert [s["rule"] for s in data["steps"]] == ["beta", "mu", "beta", "beta", "beta"]
    code, text, _ = run(capsys, "reduce", "--trace", "-e", CONTROL)
    assert text.splitlines()[-1].startswith("5 step(s)")


def test_small_step_reduction(capsys):
    code, data = run_json(capsys, "reduce", "--calc", "lmus", "--strategy", "leftmost", "-e", r"(\x.x x)(\y.y)")
    assert code == 0 and data["final"] == r"\y.y"
    assert run(capsys, "reduce", "--calc", "lmus", "--strategy", "head", "-e", "x")[0] == 2


def test_fuel_exhaustion_exit_code(capsys):
    assert run(capsys, "reduce", "--fuel", "10", "-e", OMEGA)[0] == 3
    assert run(capsys, "eta", "--fuel", "200", "-e", OMEGA)[0] == 3


def test_eta(capsys):
    for extra in ([], ["--oracle"]):
        code, data = run_json(capsys, "eta", *extra, "-e", r"(\x.x x) ((\w.w) (\w.w))")
        assert code == 0 and data["eta"] == 4
    code, data = run_json(capsys, "eta", "--calc", "lmus", "-e", r"\x0.(x2 x2)[x2/x1][x1/x0]")
    assert data["eta"] == 4


def test_synthesize_and_check(capsys, tmp_path):
    code, data = run_json(capsys, "synthesize", "--system", "S", "-e", r"(\y.x) z")
    assert code == 0 and data["size"] == 4
    f = tmp_path / "d.json"
    f.write_text(json.dumps(data["derivation"]))
    code, checked = run_json(capsys, "check", str(f))
    assert code == 0 and checked["valid"] and checked["size"] == 4 and checked["relevant"]


def test_synthesize_lmus(capsys):
    code, data = run_json(capsys, "synthesize", "--system", "Slmus", "-e", r"mu b.([a] x){a//b.u}")
    assert code == 0 and data["size"] == 4.5


def test_synthesis_of_omega_exhausts_fuel(capsys):
    assert run(capsys, "synthesize", "--system", "S", "--fuel", "500", "-e", OMEGA)[0] == 3
    assert run(capsys, "synthesize", "--system", "H", "--fuel", "500", "-e", OMEGA)[0] == 3


def test_check_rejects_a_broken_derivation(capsys, tmp_path):
    data = to_json(callcc_derivation())
    data["conclusion"]["delta"] = {"zz": [{"base": "a"}]}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(data))
    code, out = run_json(capsys, "check", str(f))
    assert code == 1 and not out["valid"]
    f.write_text("{not json")
    assert run(capsys, "check", str(f))[0] == 2


def test_verify_bound(capsys):
    code, data = run_json(capsys, "verify-bound", "--mode", "head", "-e", rf"(\x.y) ({OMEGA})")
    assert code == 0 and data["ok"] and data["observed"] == 1
    code, data = run_json(capsys, "verify-bound", "--mode", "max", "-e", r"(\x.x x) (\w.w)")
    assert code == 0 and data["observed"] == 2 and data["size"] >= 2


def test_proptest_is_deterministic(capsys):
    args = ("proptest", "--suite", "sr", "--count", "40", "--seed", "42", "--max-size", "9")
    first = run(capsys, "--json", *args)
    second = run(capsys, "--json", *args)
    assert first[0] == 0 and first[1] == second[1]


def test_seed_environment_override(capsys, monkeypatch):
    monkeypatch.setenv("LAMMU_SEED", "9")
    code, data = run_json(capsys, "proptest", "--suite", "oracle", "--count", "5", "--seed", "1")
    assert code == 0 and data["seed"] == 9
    monkeypatch.setenv("LAMMU_SEED", "nine")
    assert run(capsys, "proptest", "--suite", "oracle", "--count", "5")[0] == 2


def test_proptest_failure_exit_code(capsys, monkeypatch):
    from lammu import cli
    from lammu.props import SuiteReport
    monkeypatch.setattr(cli, "run_suite", lambda *a: SuiteReport("sr", "lmu", 0, 1, 8, 1, ((0, "x"),)))
    assert run(capsys, "proptest", "--suite", "sr", "--count", "1")[0] == 1


def test_check_accepts_synthesize_output_directly(capsys, tmp_path):
    _, data = run_json(capsys, "synthesize", "--system", "H", "-e", r"\x.x")
    f = tmp_path / "out.json"
    f.write_text(json.dumps(data))
    code, checked = run_json(capsys, "check", str(f))
    assert code == 0 and checked["system"] == data["derivation"]["system"]
