"""Normalization: NNF, unnesting, function elimination, negated comparisons."""

import pytest

from conftest import fold_functions, load
from fo2asp.errors import ValidationError
from fo2asp.normalize import (
    check_normalized, eliminate_functions, normalization_violations, normalize,
    push_comparison_negations, rectify, to_nnf, unnest_terms,
)
from fo2asp.oracle import solve_bruteforce, well_founded_model
from fo2asp.syntax import (
    And, Bool, Cardinality, Comparison, Definition, Exists, Forall, FuncApp, Implies, Int,
    ModelExpansionProblem, Not, Or, PredAtom, Rule, Theory, Var, free_variables, variable_names,
)

X = Var("x", "T")
Y = Var("y", "T")
N = Var("n", "N")


def P(*args):
    return PredAtom("P", tuple(args))


def Q(*args):
    return PredAtom("Q", tuple(args))


def same_solutions(m):
    n = normalize(m)
    after = {fold_functions(s, m.vocabulary, n.function_renaming)
             for s in solve_bruteforce(n.as_problem())}
    return solve_bruteforce(m) == after


# ----------------------------------------------------------------------- NNF


def test_implication_becomes_disjunction():
    assert to_nnf(Implies(P(X), Q(X))) == Or(Not(P(X)), Q(X))


def test_negated_universal_becomes_existential():
    assert to_nnf(Not(Forall(X, And(P(X), Q(X))))) == Exists(X, Or(Not(P(X)), Not(Q(X))))


def test_double_negation_and_constants():
    assert to_nnf(Not(Not(P(X)))) == P(X)
    assert to_nnf(Not(Bool(True))) == Bool(False)


def test_negated_comparison_is_kept_for_later():
    c = Comparison(X, "=", Y)
    assert to_nnf(Not(c)) == Not(c)


def test_coloring_constraint_nnf(gc):
    f = to_nnf(gc.theory.sentences[0])
    assert isinstance(f, Forall) and isinstance(f.body, Forall)
    body = f.body.body
    assert isinstance(body, Or)
    assert body.left == Not(PredAtom("Border", (Var("c1", "Country"), Var("c2", "Country"))))


# ------------------------------------------------------------------ unnesting


def test_simple_atom_is_unchanged():
    assert unnest_terms(P(X)) == P(X)


def test_nested_function_is_unnested(gc):
    f = unnest_terms(to_nnf(gc.theory.sentences[0]))
    # negated comparisons are only pushed inward by a later pass
    assert [v for v in normalization_violations(f) if "negation" not in v] == []
    assert same_solutions(gc)


def test_cardinality_comparison_of_two_cardinalities():
    m = load("""
        vocabulary { type T P(T) Q(T) }
        structure { T = {a, b, c} }
        theory { #{x : P(x)} > #{x : Q(x)}. }""")
    n = normalize(m)
    for f in n.theory.sentences:
        assert normalization_violations(f) == []
    assert same_solutions(m)


def test_function_in_predicate_argument():
    m = load("""
        vocabulary { type T P(T) F(T) : T }
        structure { T = {a, b} P = {a} }
        theory { !x : P(F(x)). }""")
    assert same_solutions(m)


# ----------------------------------------------------------- function removal


def test_function_becomes_graph_predicate(gc):
    n = eliminate_functions(gc)
    assert n.vocabulary.functions == {}
    assert n.vocabulary.predicates["ColorOf"] == ("Country", "Color")
    (exact,) = n.generated_constraints
    assert isinstance(exact, Forall) and exact.var.type == "Country"
    card = exact.body
    assert isinstance(card, Comparison) and card.op == "=" and card.right == Int(1)
    assert isinstance(card.left, Cardinality) and card.left.vars[0].type == "Color"


def test_function_table_becomes_relation():
    m = load("""
        vocabulary { type Country type Color ColorOf(Country) : Color }
        structure { Country = {be} Color = {red, blue} ColorOf = {be -> red} }
        theory { }""")
    n = normalize(m)
    assert set(n.structure.predicates["ColorOf"]) == {("be", "red")}
    assert len(n.generated_constraints) == 1


def test_constant_becomes_unary_predicate():
    m = load("vocabulary { type Color c : Color } structure { Color = {red, blue} } theory { }")
    n = normalize(m)
    assert n.vocabulary.predicates["c"] == ("Color",)
    (exact,) = n.generated_constraints
    assert isinstance(exact, Comparison) and exact.right == Int(1)
    assert len(solve_bruteforce(n.as_problem())) == 2


# --------------------------------------------------------- negated comparisons


def test_negated_order_flips():
    assert push_comparison_negations(Not(Comparison(N, "<=", Int(1)))) == Comparison(N, ">", Int(1))


def test_negated_equality():
    assert push_comparison_negations(Not(Comparison(X, "=", Y))) == Comparison(X, "!=", Y)


def test_negated_cardinality_comparison():
    card = Cardinality((Y,), Q(Y))
    got = push_comparison_negations(Not(Comparison(card, "=", N)))
    assert got == Comparison(card, "!=", N)


# ---------------------------------------------------------------- whole pipeline


def test_coloring_normal_form(gc):
    n = normalize(gc)
    check_normalized(n)
    assert set(n.vocabulary.predicates) == {"Border", "SymBorder", "ColorOf"}
    assert same_solutions(gc)


def test_normalized_problem_is_a_fixpoint(gc):
    once = normalize(gc).as_problem()
    assert normalize(once).as_problem() == once


def test_equivalence_in_definition_body():
    m = load("""
        vocabulary { type T P(T) Q(T) R(T) }
        structure { T = {a, b, c} P = {a; b} Q = {b; c} }
        theory { define { R(x) <- P(x) <=> Q(x). } }""")
    n = normalize(m)
    (rule,) = n.theory.definitions[0].rules
    assert rule.head == m.theory.definitions[0].rules[0].head
    assert normalization_violations(rule.body) == []
    before = well_founded_model(m.theory.definitions[0], m.structure)
    after = well_founded_model(n.theory.definitions[0], n.structure)
    assert before == after == {"R": frozenset({("b",)})}


def test_head_with_function_is_rejected():
    m = load("vocabulary { type T P(T) F(T) : T } structure { T = {a} } theory { }")
    bad = Rule(PredAtom("P", (FuncApp("F", (X,), "T"),)), Bool(True))
    with pytest.raises(ValidationError):
        normalize(ModelExpansionProblem(m.vocabulary, m.structure,
                                        Theory((), (Definition((bad,)),))))


def test_rectify_renames_apart():
    f = And(Exists(X, P(X)), Exists(X, Q(X)))
    g = rectify(And(P(X), f), set())
    assert free_variables(g) == (X,)
    assert len(variable_names(g)) == 3
