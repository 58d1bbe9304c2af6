"""Command-line behaviour and exit codes."""

import io
import sys

import pytest

from conftest import data_path
from fo2asp.cli import run_cli
from fo2asp.parser import parse_problem, parse_structures

GC = data_path("gc.fod")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_translate_prints_22_statements():
    code, out, _ = run("translate", GC)
    assert code == 0
    assert len(out.splitlines()) == 22


def test_translate_stats_and_output_file(tmp_path):
    target = tmp_path / "gc.lp"
    code, out, err = run("translate", GC, "-o", str(target), "--stats")
    assert code == 0 and out == ""
    assert len(target.read_text().splitlines()) == 22
    assert "alpha1: 5" in err and "total: 22" in err and "ground atoms:" in err


def test_dump_normalized():
    code, _, err = run("translate", GC, "--dump-normalized")
    assert code == 0
    assert "ColorOf(Country, Color)" in err


def test_solve_builtin_prints_two_structures():
    code, out, _ = run("solve", GC, "--builtin", "--models", "0")
    assert code == 0
    assert out.count("// model") == 2
    with open(GC) as fh:
        v = parse_problem(fh.read()).vocabulary
    assert len(parse_structures(out, v)) == 2


def test_solve_model_limit():
    code, out, _ = run("solve", GC, "--builtin", "--models", "1")
    assert code == 0 and out.count("// model") == 1


def test_solve_is_deterministic():
    assert run("solve", GC, "--builtin") == run("solve", GC, "--builtin")


def test_solve_unsat(tmp_path):
    f = tmp_path / "unsat.fod"
    f.write_text("vocabulary { p } structure { p = false } theory { define { p <- true. } }")
    code, out, _ = run("solve", str(f), "--builtin")
    assert code == 10 and out == "UNSATISFIABLE\n"


def test_solve_uses_environment_solver(monkeypatch):
    monkeypatch.setenv("FOLASP_SOLVER", "/nonexistent/solver")
    code, _, err = run("solve", GC)
    assert code == 30 and "not found" in err
    assert run("solve", GC, "--builtin")[0] == 0


def test_solve_with_stub_solver():
    script = "import sys; sys.stdin.read(); print('UNSATISFIABLE')"
    code, out, _ = run("solve", GC, "--solver", f'{sys.executable} -c "{script}"')
    assert code == 10 and out == "UNSATISFIABLE\n"


def test_check_model(tmp_path):
    code, out, _ = run("solve", GC, "--builtin", "--models", "1")
    model = tmp_path / "model.fod"
    model.write_text(out)
    assert run("check", GC, str(model))[:2] == (0, "MODEL\n")


def test_check_accepts_all_solve_output(tmp_path):
    _, out, _ = run("solve", GC, "--builtin")
    models = tmp_path / "models.fod"
    models.write_text(out)
    assert run("check", GC, str(models))[:2] == (0, "MODEL\nMODEL\n")
    with open(data_path("bad_model.fod")) as fh:
        models.write_text(out + fh.read())
    assert run("check", GC, str(models))[:2] == (10, "MODEL\nMODEL\nNOT A MODEL\n")


def test_check_empty_model_file(tmp_path):
    empty = tmp_path / "empty.fod"
    empty.write_text("// nothing\n")
    assert run("check", GC, str(empty))[0] == 20


def test_check_bad_model():
    code, out, _ = run("check", GC, data_path("bad_model.fod"))
    assert (code, out) == (10, "NOT A MODEL\n")


def test_compare_equal():
    code, out, _ = run("compare", GC)
    assert (code, out) == (0, "EQUAL: 2 solutions\n")


def test_compare_cap():
    code, _, err = run("compare", GC, "--cap", "3")
    assert code == 20 and "cap" in err


@pytest.mark.parametrize("argv", [
    ["translate", "/nonexistent.fod"],
    ["frobnicate"],
    ["solve", GC, "--models", "-1"],
    [],
])
def test_input_errors(argv):
    assert run(*argv)[0] == 20


def test_parse_error_exit(tmp_path):
    f = tmp_path / "bad.fod"
    f.write_text("vocabulary { type T ")
    code, _, err = run("translate", str(f))
    assert code == 20 and "line" in err
