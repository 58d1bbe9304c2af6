"""Solver output parsing, solver processes and back-mapping."""

import sys

import pytest

from fo2asp.asp import Atom, parse_program
from fo2asp.backend import (
    answer_set_to_structure, answer_sets_to_structures, parse_answer_sets, run_solver,
    solver_argv,
)
from fo2asp.errors import AnswerSetParseError, BackMappingError
from fo2asp.oracle import solve
from fo2asp.translate import translate

def fake_solver(output: str) -> str:
    """A stand-in solver printing a fixed answer for any program."""
    script = f"import sys; sys.stdin.read(); print({output!r}, end='')"
    return " ".join([sys.executable, "-c", f'"{script}"'])


def test_parse_one_answer():
    status, sets = parse_answer_sets("Answer: 1\ncolorOf(be,red) delta_1\nSATISFIABLE\n")
    assert status == "SAT"
    assert sets == [frozenset({Atom("colorOf", ("be", "red")), Atom("delta_1")})]


def test_parse_unsatisfiable():
    assert parse_answer_sets("UNSATISFIABLE\n") == ("UNSAT", [])


def test_parse_malformed_atom():
    with pytest.raises(AnswerSetParseError):
        parse_answer_sets("Answer: 1\ncolorOf(be,")


def test_parse_missing_marker():
    with pytest.raises(AnswerSetParseError):
        parse_answer_sets("Answer: 1\np\n")


def test_parse_clingo_style_output():
    raw = ("clingo version 5.8.2\nReading from stdin\nSolving...\n"
           "Answer: 1 (Time: 0.001s)\n\nAnswer: 2 (Time: 0.001s)\nn(-3) p(a,10)\n"
           "SATISFIABLE\n\nModels       : 2\n")
    status, sets = parse_answer_sets(raw)
    assert status == "SAT"
    assert sets == [frozenset(), frozenset({Atom("n", (-3,)), Atom("p", ("a", 10))})]


def test_parse_unknown_is_an_error():
    with pytest.raises(AnswerSetParseError):
        parse_answer_sets("UNKNOWN\n")


def test_model_placeholder():
    assert solver_argv("clingo --models {models}", 0) == ["clingo", "--models", "0"]
    assert solver_argv("my-solver -n 3", 7) == ["my-solver", "-n", "3"]


def test_missing_executable():
    res = run_solver(parse_program("p."), "/nonexistent/solver")
    assert res.status == "ERROR"
    assert "not found" in res.error


def test_fake_solver_unsat():
    res = run_solver(parse_program(":- not p."), fake_solver("UNSATISFIABLE\n"))
    assert (res.status, res.answer_sets) == ("UNSAT", [])


def test_fake_solver_garbage():
    res = run_solver(parse_program("p."), fake_solver("segfault\n"))
    assert res.status == "ERROR"


def test_solver_timeout():
    cmd = f'{sys.executable} -c "import time; time.sleep(5)"'
    res = run_solver(parse_program("p."), cmd, timeout=0.2)
    assert res.status == "ERROR" and "timed out" in res.error


# ---------------------------------------------------------------- back-mapping


def test_back_mapping_of_coloring(gc, gc_solution):
    out = translate(gc)
    structures = answer_sets_to_structures(solve(out.program), out, gc)
    assert len(structures) == 2
    assert gc_solution in structures


def test_aux_atoms_are_dropped(gc, gc_solution):
    out = translate(gc)
    (model,) = [a for a in solve(out.program)
                if answer_set_to_structure(a, out, gc) == gc_solution]
    assert any(out.name_map.is_aux(x.predicate) for x in model)
    s = answer_set_to_structure(model, out, gc)
    assert set(s.predicates) == {"Border", "SymBorder"}
    assert set(s.functions) == {"ColorOf"}


def _coloring_atoms(colors):
    atoms = {Atom("country", (c,)) for c in ("be", "nl", "lux")}
    atoms |= {Atom("color", (c,)) for c in ("red", "blue")}
    atoms |= {Atom("border", t) for t in (("nl", "be"), ("be", "lux"))}
    atoms |= {Atom("symBorder", t) for t in (("nl", "be"), ("be", "nl"), ("be", "lux"),
                                             ("lux", "be"))}
    atoms |= {Atom("colorOf", pair) for pair in colors}
    return atoms


def test_function_must_be_functional(gc):
    out = translate(gc)
    atoms = _coloring_atoms([("be", "red"), ("be", "blue"), ("nl", "blue"), ("lux", "blue")])
    with pytest.raises(BackMappingError, match="maps"):
        answer_set_to_structure(atoms, out, gc)


def test_function_must_be_total(gc):
    out = translate(gc)
    atoms = _coloring_atoms([("be", "red"), ("nl", "blue")])
    with pytest.raises(BackMappingError, match="total"):
        answer_set_to_structure(atoms, out, gc)


def test_interpreted_symbols_must_match(gc):
    out = translate(gc)
    atoms = _coloring_atoms([("be", "red"), ("nl", "blue"), ("lux", "blue")])
    atoms.add(Atom("border", ("lux", "nl")))
    with pytest.raises(BackMappingError, match="Border"):
        answer_set_to_structure(atoms, out, gc)


def test_unknown_atoms_are_rejected(gc):
    out = translate(gc)
    atoms = _coloring_atoms([("be", "red"), ("nl", "blue"), ("lux", "blue")])
    with pytest.raises(BackMappingError):
        answer_set_to_structure(atoms | {Atom("stranger", ("be",))}, out, gc)
    with pytest.raises(BackMappingError):
        answer_set_to_structure(atoms | {Atom("border", ("be", "mars"))}, out, gc)


def test_duplicates_collapse(gc):
    out = translate(gc)
    atoms = frozenset(_coloring_atoms([("be", "red"), ("nl", "blue"), ("lux", "blue")]))
    extra = atoms | {Atom("delta_1")}
    assert len(answer_sets_to_structures([atoms, extra], out, gc)) == 1
