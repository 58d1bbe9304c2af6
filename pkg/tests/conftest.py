import os
import sys

import pytest

from fo2asp.parser import parse_problem, parse_structure
from fo2asp.syntax import Structure
from fo2asp.validate import validate_problem

DATA = os.path.join(os.path.dirname(__file__), "data")
sys.path.insert(0, os.path.dirname(__file__))


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


def load(source: str):
    return validate_problem(parse_problem(source))


@pytest.fixture
def gc():
    with open(data_path("gc.fod"), encoding="utf-8") as fh:
        return load(fh.read())


@pytest.fixture
def gc_solution(gc):
    """The coloring be=red, nl=blue, lux=blue with the symmetric closure."""
    return parse_structure("""
        structure {
          Country = {be, nl, lux}
          Color = {red, blue}
          Border = {nl,be; be,lux}
          SymBorder = {nl,be; be,nl; be,lux; lux,be}
          ColorOf = {be -> red; nl -> blue; lux -> blue}
        }""", gc.vocabulary)


def fold_functions(s, vocabulary, renaming):
    """Turn graph relations of a normalized solution back into functions."""
    preds = {p: s.predicates[p] for p in vocabulary.predicates}
    funcs = {}
    for f in vocabulary.functions:
        table = {}
        for row in s.predicates[renaming[f]]:
            assert row[:-1] not in table, f"{f} is not a function in {s}"
            table[row[:-1]] = row[-1]
        funcs[f] = table
    return Structure(dict(s.types), preds, funcs)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
