"""Property-based checks over randomly generated problems and programs."""

import itertools

from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import fold_functions
from generators import random_problem
from fo2asp.asp import AspRule, Atom, Literal, check_safety, emit, parse_program
from fo2asp.backend import answer_sets_to_structures
from fo2asp.normalize import check_normalized, normalize
from fo2asp.oracle import solve, solve_bruteforce, stable_models
from fo2asp.parser import parse_problem
from fo2asp.syntax import Theory, format_problem
from fo2asp.translate import translate
from fo2asp.validate import validate_problem

seeds = st.integers(min_value=0, max_value=10 ** 6)
quick = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@quick
@given(seeds)
def test_print_parse_round_trip(seed):
    m = random_problem(seed)
    assert validate_problem(parse_problem(format_problem(m))) == m


@quick
@given(seeds)
def test_normal_form(seed):
    n = normalize(random_problem(seed))
    check_normalized(n)
    assert n.vocabulary.functions == {}


@quick
@given(seeds)
def test_normalization_preserves_solutions(seed):
    m = random_problem(seed)
    n = normalize(m)
    after = {fold_functions(s, m.vocabulary, n.function_renaming)
             for s in solve_bruteforce(n.as_problem())}
    assert after == solve_bruteforce(m)


@quick
@given(seeds)
def test_emitted_program_round_trips_and_is_safe(seed):
    p = translate(random_problem(seed)).program
    assert check_safety(p) == []
    assert parse_program(emit(p)) == p


@quick
@given(seeds)
def test_empty_theory_answer_sets_are_the_search_space(seed):
    m = random_problem(seed, n_sentences=0, n_definitions=0)
    assert m.theory == Theory()
    out = translate(m)
    got = answer_sets_to_structures(solve(out.program), out, m)
    assert set(got) == solve_bruteforce(m)
    assert len(got) == len(set(got))


@quick
@given(seeds)
def test_translation_matches_brute_force(seed):
    m = random_problem(seed)
    out = translate(m)
    assert set(answer_sets_to_structures(solve(out.program), out, m)) == solve_bruteforce(m)


# ------------------------------------------- the enumerator against the definition

ATOMS = [Atom(x) for x in "abcd"]


@st.composite
def ground_programs(draw):
    rules = []
    for _ in range(draw(st.integers(1, 6))):
        head = draw(st.one_of(st.none(), st.sampled_from(ATOMS)))
        body = draw(st.lists(st.tuples(st.sampled_from(ATOMS), st.booleans()), max_size=3))
        choice = head is not None and draw(st.integers(0, 4)) == 0
        rules.append(AspRule(head, tuple(Literal(a, s) for a, s in body), choice))
    return rules


def _least_model(rules, interpretation):
    """Least model of the reduct of ``rules`` with respect to ``interpretation``."""
    model = set()
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.head is None or r.head in model:
                continue
            if r.choice and r.head not in interpretation:
                continue
            if any(not b.positive and b.atom in interpretation for b in r.body):
                continue
            if all(b.atom in model for b in r.body if b.positive):
                model.add(r.head)
                changed = True
    return model


def _satisfies_constraints(rules, interpretation):
    return not any(
        r.head is None and all((b.atom in interpretation) == b.positive for b in r.body)
        for r in rules)


@settings(max_examples=300, deadline=None)
@given(ground_programs())
def test_stable_models_match_reduct_definition(rules):
    expected = set()
    for bits in itertools.product((False, True), repeat=len(ATOMS)):
        interp = {a for a, b in zip(ATOMS, bits) if b}
        if _least_model(rules, interp) == interp and _satisfies_constraints(rules, interp):
            expected.add(frozenset(interp))
    assert set(stable_models(rules)) == expected
