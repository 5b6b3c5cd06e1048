import json
import subprocess
import sys

import pytest

import reference
from hybrid_alba.cli import main

GOLDEN = "[]<>@'i <>p -> <>[]p"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_echoes_canonical_form(capsys):
    code, out, _ = run(capsys, "parse", "[]<>@'i<>p->  <>[]p")
    assert code == 0 and out.strip() == "[]<>@'i <> p -> <>[] p"
    code, out, _ = run(capsys, "parse", "p & q", "--json")
    assert json.loads(out)["variables"] == ["p", "q"]


def test_parse_error_is_usage_error(capsys):
    code, _, err = run(capsys, "parse", "p &")
    assert code == 1 and "offset 3" in err


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "[]@'i <>p -> <>[]p", "--json")
    data = json.loads(out)
    assert code == 0
    assert set(data["certificates"]) == {"extended-inductive", "extended-skeletal"}
    assert data["certificates"]["extended-skeletal"] == {"epsilon": {"p": "1"}, "omega_pairs": []}
    code, out, _ = run(capsys, "classify", "[]<>p -> <>[]p")
    assert "fragments: none" in out


def test_correspond_golden(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = run(capsys, "correspond", GOLDEN, "--trace", str(trace), "--emit-pure-hybrid")
    assert code == 0
    assert "status: success" in out and "hybrid: " in out and "\nfo: " in out
    data = json.loads(trace.read_text())
    assert set(data) >= {"input", "certificate", "tree", "status", "pure_systems", "fo"}
    assert {reference.rename_generated(x) for x in data["pure_systems"]} == {
        "'i0 <= []<> false & <>[] false <= ~'i1 => 'i0 <= ~'i1",
        "'i0 <= []<> true & 'i <= <> 'j0 & <>[] 'j0 <= ~'i1 => 'i0 <= ~'i1",
    }
    assert all({"system", "rule", "consumed", "produced", "children"} <= set(row) for row in data["tree"])


def test_correspond_failure_exit_code(capsys):
    code, out, _ = run(capsys, "correspond", "[]<>p -> <>[]p", "--json")
    assert code == 2
    assert json.loads(out)["status"] == "failure"


def test_correspond_bad_epsilon(capsys):
    code, _, err = run(capsys, "correspond", "p -> p", "--epsilon", "p=x")
    assert code == 1 and err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "p -> p", "--max-worlds", "2")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "verify", "[]<>p -> <>[]p", "--max-worlds", "1")
    assert code == 2 and out.startswith("FAIL")


def test_verify_respects_world_cap(capsys, monkeypatch):
    monkeypatch.setenv("ALBA_MAX_WORLDS", "1")
    code, out, _ = run(capsys, "verify", GOLDEN, "--json")
    data = json.loads(out)
    assert code == 0 and data["max_worlds"] == 1 and data["frames_checked"] == 2


def test_corpus(capsys):
    code, out, _ = run(capsys, "corpus", "--fragment", "extended-skeletal", "--n", "20", "--seed", "7",
                       "--restricted", "--soundness-worlds", "1", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["success"] == 20 and data["discrepancies"] == [] and data["soundness_checked"] == 20


def test_output_is_byte_identical_across_processes(tmp_path):
    def once(name):
        trace = tmp_path / name
        proc = subprocess.run([sys.executable, "-m", "hybrid_alba", "correspond", GOLDEN, "--trace", str(trace)],
                              capture_output=True, check=True)
        return proc.stdout, trace.read_bytes()

    assert once("a.json") == once("b.json")
    cmd = [sys.executable, "-m", "hybrid_alba", "corpus", "--n", "15", "--seed", "3", "--soundness-worlds", "0"]
    assert subprocess.run(cmd, capture_output=True).stdout == subprocess.run(cmd, capture_output=True).stdout
