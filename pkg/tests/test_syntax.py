"""Parsing, pretty-printing and validation of FO(.) problems."""

import glob
import os

import pytest

from conftest import DATA, load
from fo2asp.errors import ParseError, ValidationError
from fo2asp.parser import parse_problem, parse_structure, parse_structures
from fo2asp.syntax import (
    Cardinality, Comparison, Exists, Forall, PredAtom, Var, format_problem,
    format_structure, free_variables,
)
from fo2asp.validate import validate_problem


def test_coloring_problem_shape(gc):
    v = gc.vocabulary
    assert v.types == ("Country", "Color")
    assert set(v.predicates) == {"Border", "SymBorder"}
    assert v.functions == {"ColorOf": (("Country",), "Color")}
    assert len(gc.theory.sentences) == 1
    assert len(gc.theory.definitions) == 1
    assert len(gc.theory.definitions[0].rules) == 2


def test_empty_problem():
    m = load("vocabulary{} structure{} theory{}")
    assert m.vocabulary.types == ()
    assert m.theory.sentences == () and m.theory.definitions == ()


def test_undeclared_symbol_is_named():
    with pytest.raises(ParseError) as e:
        parse_problem("vocabulary { type T } structure { T = {a} } theory { !x : Foo(x). }")
    assert "Foo" in str(e.value)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        parse_problem("vocabulary {\n  type T\n  P(T\n}")
    assert e.value.line == 4


def test_duplicate_declaration():
    with pytest.raises(ParseError):
        parse_problem("vocabulary { type T P(T) P(T) } structure { T = {a} } theory { }")


def test_round_trip_of_coloring(gc):
    text = format_problem(gc)
    again = validate_problem(parse_problem(text))
    assert again == gc
    assert format_problem(again) == text


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(DATA, "*.fod"))))
def test_round_trip_of_data_files(path, gc):
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    if "vocabulary" not in source:
        s = parse_structure(source, gc.vocabulary)
        assert parse_structure(format_structure(s, gc.vocabulary), gc.vocabulary) == s
        return
    m = parse_problem(source)
    assert parse_problem(format_problem(m)) == m


def test_round_trip_of_every_construct():
    m = load("""
        vocabulary { type N type T P(T) Q(N, T) c : T F(T) : N p }
        structure { N = {0, 1, -2} T = {a, b} P = {a} F = {a -> 0; b -> 1} }
        theory {
          !x[T] : P(x) <=> ~(?n : Q(n, x) | n < F(x)).
          p => #{x, n : Q(n, x)} >= #{y : P(y)}.
          c = a & true & ~false.
          define { p <- ?x : P(x) & x ~= c. }
        }""")
    assert validate_problem(parse_problem(format_problem(m))) == m


def test_structure_round_trip(gc, gc_solution):
    text = format_structure(gc_solution, gc.vocabulary)
    assert parse_structure(text, gc.vocabulary) == gc_solution
    assert parse_structures(text + text, gc.vocabulary) == [gc_solution, gc_solution]


def test_type_inference_in_definition(gc):
    rule = gc.theory.definitions[0].rules[0]
    assert [a.type for a in rule.head.args] == ["Country", "Country"]


def test_inference_from_both_positions():
    m = load("""vocabulary { type Country Border(Country, Country) }
                structure { Country = {be} } theory { !x : Border(x, x). }""")
    assert m.theory.sentences[0].var.type == "Country"


def test_element_in_two_types_breaks_partition():
    with pytest.raises(ValidationError):
        load("vocabulary { type Country type Color } "
             "structure { Country = {red, be} Color = {red} } theory { }")


def test_ordering_on_symbolic_type_is_rejected():
    with pytest.raises(ValidationError):
        load("vocabulary { type T } structure { T = {a, b} } theory { !x, y[T] : x < y. }")


def test_conflicting_inference_is_rejected():
    with pytest.raises(ValidationError):
        load("vocabulary { type A type B P(A) Q(B) } structure { A = {a} B = {b} } "
             "theory { !x : P(x) & Q(x). }")


def test_untyped_variable_is_rejected():
    with pytest.raises(ValidationError):
        load("vocabulary { type A } structure { A = {a} } theory { !x : x = x. }")


def test_uninterpreted_type_is_rejected():
    with pytest.raises(ValidationError):
        load("vocabulary { type A } structure { } theory { }")


def test_partial_function_is_rejected():
    with pytest.raises(ValidationError):
        load("vocabulary { type A F(A) : A } structure { A = {a, b} F = {a -> b} } theory { }")


def test_free_variables():
    c1, c2 = Var("c1", "Country"), Var("c2", "Country")
    x, y, z = Var("x", "Country"), Var("y", "Color"), Var("z")
    assert free_variables(PredAtom("Border", (c1, c2))) == (c1, c2)
    assert free_variables(Exists(y, PredAtom("ColorOf", (c1, y)))) == (c1,)
    card = Comparison(Cardinality((y,), PredAtom("ColorOf", (x, y))), "=", z)
    assert free_variables(card) == (x, z)
    assert free_variables(Forall(c1, PredAtom("Border", (c1, c2)))) == (c2,)
