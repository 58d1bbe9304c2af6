"""ASP-Core-2 program representation, printing and safety."""

import pytest

from fo2asp.asp import (
    AggregateElement, AspProgram, AspRule, Atom, BuiltinComparison, CountAggregate, Literal,
    Variable, check_safety, emit, parse_program,
)
from fo2asp.errors import ParseError
from fo2asp.translate import translate

C, X, C1, C2 = Variable("C"), Variable("X"), Variable("C1"), Variable("C2")


def a(pred, *args):
    return Atom(pred, tuple(args))


def pos(pred, *args):
    return Literal(a(pred, *args), True)


def neg(pred, *args):
    return Literal(a(pred, *args), False)


def test_constraint_line():
    r = AspRule(None, (neg("delta_1"),))
    assert emit([r]) == ":- not delta_1.\n"


def test_choice_rule_line():
    r = AspRule(a("colorOf", C, X), (pos("country", C), pos("color", X)), choice=True)
    assert emit([r]) == "{colorOf(C,X)} :- country(C), color(X).\n"


def test_zero_ary_choice_and_fact():
    assert emit([AspRule(a("p"), (), choice=True), AspRule(a("q"), ())]) == "{p}.\nq.\n"


def test_aggregate_rule_line():
    agg = CountAggregate(
        (AggregateElement((X,), (pos("delta_5", C1, C2, X), pos("color", X))),), "=", 2)
    r = AspRule(a("delta_4", C1, C2), (agg, pos("country", C1), pos("country", C2)))
    assert emit([r]) == ("delta_4(C1,C2) :- #count{X : delta_5(C1,C2,X), color(X)} = 2, "
                         "country(C1), country(C2).\n")


def test_comparison_and_integers():
    r = AspRule(a("p", X), (pos("n", X), BuiltinComparison(X, "!=", -1)))
    assert emit([r]) == "p(X) :- n(X), X != -1.\n"


def test_parse_round_trip():
    text = ("{colorOf(C,X)} :- country(C), color(X).\n"
            "country(be).\n"
            "delta_4(C1,C2) :- #count{X : delta_5(C1,C2,X), color(X)} = 2, country(C1), "
            "country(C2).\n"
            "delta_3 :- #count{C1,C2 : delta_4(C1,C2), country(C1), country(C2)} = 9.\n"
            "d(X) :- n(X), X <= 2, not e(X).\n"
            ":- not delta_3.\n"
            "{p}.\n")
    p = parse_program(text)
    assert emit(p) == text
    assert parse_program(emit(p)) == p


def test_translated_program_round_trip(gc):
    p = translate(gc).program
    assert parse_program(emit(p)) == p


def test_parse_error():
    with pytest.raises(ParseError):
        parse_program("p(X :- q.")


def test_unbound_head_variable_is_unsafe():
    p = parse_program("p(X).")
    assert check_safety(p) == list(p)


def test_variable_only_in_negative_literal_is_unsafe():
    p = parse_program("p :- not q(X).")
    assert len(check_safety(p)) == 1


def test_aggregate_local_variables_are_safe():
    p = parse_program("d :- #count{X : q(X), t(X)} = 2.")
    assert check_safety(p) == []


def test_aggregate_local_variable_unbound_in_element():
    p = parse_program("d :- #count{X : not q(X)} = 2.")
    assert len(check_safety(p)) == 1


def test_comparison_does_not_bind():
    p = parse_program("p(X) :- X = 1.")
    assert len(check_safety(p)) == 1


def test_translated_coloring_is_safe(gc):
    assert check_safety(translate(gc).program) == []


def test_program_is_a_sequence():
    p = AspProgram([AspRule(a("q"), ())])
    assert len(p) == 1 and list(p)[0].head == a("q")
