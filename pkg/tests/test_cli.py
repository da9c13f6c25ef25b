import json
import subprocess
import sys

import pytest

from arrowlab.cli import parse_runspec, run


def test_orders_counts(capsys):
    for m, count in [(1, 1), (2, 3), (3, 13), (4, 75)]:
        assert run(["orders", "-m", str(m)]) == 0
        assert len(capsys.readouterr().out.splitlines()) == count


def test_orders_json(capsys):
    assert run(["orders", "-m", "3", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["orders"]) == 13


def test_profiles_count(capsys):
    assert run(["profiles", "-n", "3", "-m", "3", "--count"]) == 0
    assert capsys.readouterr().out == "2197\n"
    assert run(["profiles", "--count"]) == 0
    assert capsys.readouterr().out == "169\n"


def test_profiles_listing(capsys, tmp_path):
    out = tmp_path / "p.json"
    assert run(["profiles", "--json", "-o", str(out)]) == 0
    assert len(json.loads(out.read_text())["profiles"]) == 169
    assert run(["profiles"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "1 p:a>b>c q:a>c>b"


def test_prove_then_check(capsys, tmp_path):
    path = tmp_path / "two_voters.apf"
    assert run(["prove", "-n", "2", "-m", "3", "-o", str(path)]) == 0
    out = capsys.readouterr().out
    assert "4 top-level cases closed" in out
    assert "DictatorshipViolation(p)" in out and "DictatorshipViolation(q)" in out
    assert path.exists()
    first = path.read_bytes()
    assert run(["prove", "-o", str(path)]) == 0
    assert path.read_bytes() == first
    capsys.readouterr()
    assert run(["check", str(path)]) == 0
    assert capsys.readouterr().out == "Valid\n"
    assert run(["check", str(path), "--stats"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["status"] == "Valid" and stats["checked"]["CONCL"] == 1


def test_check_invalid_exit_2(capsys, tmp_path):
    path = tmp_path / "two_voters.apf"
    run(["prove", "-o", str(path)])
    lines = path.read_text().splitlines(keepends=True)
    i = next(k for k, ln in enumerate(lines) if "|Prop|" in ln and "=T|" in ln)
    lines[i] = lines[i].replace("=T|", "=F|")
    path.write_text("".join(lines))
    capsys.readouterr()
    assert run(["check", str(path)]) == 2
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "Invalid at line" in err


def test_check_mutants(capsys, tmp_path):
    path = tmp_path / "t.apf"
    run(["prove", "-o", str(path)])
    capsys.readouterr()
    assert run(["--seed", "7", "check", str(path), "--mutants", "12"]) == 0
    assert "12/12 mutants rejected (seed 7)" in capsys.readouterr().out


def test_cnf_and_solve(capsys, tmp_path):
    cnf, vmap, sat = tmp_path / "a.cnf", tmp_path / "v.json", tmp_path / "b.cnf"
    assert run(["cnf", "-n", "2", "-m", "3", "-o", str(cnf), "--map", str(vmap)]) == 0
    assert len(json.loads(vmap.read_text())) == 1014
    assert run(["solve", str(cnf)]) == 20
    assert run(["cnf", "-o", str(sat), "--no-nondict"]) == 0
    assert run(["solve", str(sat)]) == 10
    capsys.readouterr()
    assert run(["solve", str(sat), "--all", "--limit", "4"]) == 10
    assert "4 models (limit reached)" in capsys.readouterr().out


def test_models_and_stats(capsys):
    assert run(["models", "--limit", "10"]) == 0
    assert capsys.readouterr().out.startswith("10 models")
    assert run(["stats"]) == 0
    assert json.loads(capsys.readouterr().out)["cells"] == 1014


@pytest.mark.parametrize(
    "argv,code",
    [
        ([], 64),
        (["frobnicate"], 64),
        (["prove", "-n", "x"], 64),
        (["solve", "/nonexistent.cnf"], 64),
        (["models", "--limit", "-1"], 64),
        (["prove", "-n", "4"], 65),
        (["profiles", "-m", "5", "--count"], 65),
        (["prove", "-n", "1"], 65),
        (["prove", "--omit-unanimity"], 3),
    ],
)
def test_error_exit_codes(argv, code, capsys):
    assert run(argv) == code
    assert capsys.readouterr().err


def test_guard_override(monkeypatch, capsys):
    monkeypatch.setenv("ARROWLAB_GUARD_OVERRIDE", "1")
    assert run(["profiles", "-n", "4", "--count"]) == 0
    assert capsys.readouterr().out == "28561\n"


def test_bad_dimacs_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 1 1\n2 0\n")
    assert run(["solve", str(bad)]) == 64


def test_runspec_defaults():
    spec = parse_runspec(["prove"])
    assert (spec.voters, spec.alternatives, spec.seed) == (2, 3, 0)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "arrowlab", "profiles", "--count"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "169\n"
