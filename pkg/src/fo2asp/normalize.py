"""Normalization into function-free negation normal form.

Pipeline: ``to_nnf`` -> ``unnest_terms`` -> ``eliminate_functions`` ->
``push_comparison_negations``.  The result only contains the connectives
not/and/or/forall/exists, negation only in front of predicate atoms, and
cardinality terms only as ``#{..} op y`` with ``y`` simple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

from .errors import ValidationError
from .syntax import (
    FALSE, NEGATED_OP, SWAPPED_OP, TRUE, And, Bool, Cardinality, Comparison, Definition,
    Exists, Forall, Formula, FuncApp, Iff, Implies, Int, ModelExpansionProblem, Not, Or,
    PredAtom, Rule, Structure, Term, Theory, Var, Vocabulary, disjunction, free_variables,
    is_simple, variable_names,
)


@dataclass
class NormalizedProblem:
    vocabulary: Vocabulary
    structure: Structure
    theory: Theory
    generated_constraints: tuple[Formula, ...] = ()
    function_renaming: dict[str, str] = field(default_factory=dict)

    def as_problem(self) -> ModelExpansionProblem:
        """The normalized problem as a plain problem (exactness sentences last)."""
        th = Theory(self.theory.sentences + self.generated_constraints, self.theory.definitions)
        return ModelExpansionProblem(self.vocabulary, self.structure, th)


# ----------------------------------------------------------------------- NNF


def _map_terms(f: Formula, fn) -> Formula:
    """Apply ``fn`` to the cardinality bodies found in the atoms of ``f``."""

    def term(t: Term) -> Term:
        if isinstance(t, FuncApp):
            return replace(t, args=tuple(term(a) for a in t.args))
        if isinstance(t, Cardinality):
            return Cardinality(t.vars, fn(t.body))
        return t

    if isinstance(f, PredAtom):
        return PredAtom(f.name, tuple(term(a) for a in f.args))
    if isinstance(f, Comparison):
        return Comparison(term(f.left), f.op, term(f.right))
    return f


def _and(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return And(a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    return Or(a, b)


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Eliminate => and <=> and push negation down to atoms.

    Negated comparisons stay as ``Not(Comparison)``; flipping the operator is
    left to :func:`push_comparison_negations` so that ``~(F(x) = y)`` can
    become a negated graph atom.  Cardinality bodies are normalized too.
    """
    if isinstance(f, Bool):
        return Bool(f.value != negate)
    if isinstance(f, (PredAtom, Comparison)):
        atom = _map_terms(f, to_nnf)
        return Not(atom) if negate else atom
    if isinstance(f, Not):
        return to_nnf(f.body, not negate)
    if isinstance(f, And):
        l, r = to_nnf(f.left, negate), to_nnf(f.right, negate)
        return _or(l, r) if negate else _and(l, r)
    if isinstance(f, Or):
        l, r = to_nnf(f.left, negate), to_nnf(f.right, negate)
        return _and(l, r) if negate else _or(l, r)
    if isinstance(f, Implies):
        return to_nnf(Or(Not(f.left), f.right), negate)
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if negate:
            return _or(_and(to_nnf(a), to_nnf(b, True)), _and(to_nnf(a, True), to_nnf(b)))
        return _and(_or(to_nnf(a, True), to_nnf(b)), _or(to_nnf(a), to_nnf(b, True)))
    if isinstance(f, Forall):
        body = to_nnf(f.body, negate)
        return Exists(f.var, body) if negate else Forall(f.var, body)
    if isinstance(f, Exists):
        body = to_nnf(f.body, negate)
        return Forall(f.var, body) if negate else Exists(f.var, body)
    raise TypeError(f)


# ------------------------------------------------------------------- unnest


class _Fresh:
    def __init__(self, taken: set[str], prefix: str = "x_"):
        self.taken = set(taken)
        self.prefix = prefix
        self.k = 0

    def __call__(self) -> str:
        while True:
            self.k += 1
            name = f"{self.prefix}{self.k}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def _substitute(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, FuncApp):
        return replace(t, args=tuple(_substitute(a, old, new) for a in t.args))
    return t


def _atom_substitute(a: Formula, old: Term, new: Term) -> Formula:
    if isinstance(a, PredAtom):
        return PredAtom(a.name, tuple(_substitute(t, old, new) for t in a.args))
    return Comparison(_substitute(a.left, old, new), a.op, _substitute(a.right, old, new))


def _innermost(t: Term) -> Term | None:
    """Leftmost-innermost non-simple subterm of ``t``."""
    if isinstance(t, FuncApp):
        for a in t.args:
            inner = _innermost(a)
            if inner is not None:
                return inner
        return t
    if isinstance(t, Cardinality):
        return t
    return None


def _max_count(c: Cardinality, structure: Structure | None) -> int:
    if structure is None:
        raise ValidationError("unnesting a cardinality outside a comparison needs the structure")
    return math.prod(len(structure.types[v.type]) for v in c.vars)


def unnest_terms(f: Formula, structure: Structure | None = None,
                 pair_equalities: bool = False, fresh: _Fresh | None = None) -> Formula:
    """Rewrite an NNF formula so every non-simple term sits in an allowed atom.

    Allowed atoms are ``F(x..) = y`` and ``#{..} op y`` with simple ``x.., y``.
    Any other (negated) atom ``A`` containing ``F(t..)`` becomes the NNF of
    ``!x: F(t..) = x => A[x]``.  A cardinality term that cannot be moved to
    the left of a comparison with a simple right-hand side is replaced by a
    finite disjunction over its possible values ``0..n``, which needs the
    structure.  With ``pair_equalities`` an (in)equality between two function
    applications shares a single fresh variable:
    ``F(a) ~= G(b)`` becomes ``!x: ~(F(a) = x) | ~(G(b) = x)``.
    """
    if fresh is None:
        fresh = _Fresh(variable_names(f))

    def rec(g: Formula) -> Formula:
        if isinstance(g, Not):
            return unnest_atom(g.body, True)
        if isinstance(g, (PredAtom, Comparison)):
            return unnest_atom(g, False)
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, Or):
            return Or(rec(g.left), rec(g.right))
        if isinstance(g, (Forall, Exists)):
            return type(g)(g.var, rec(g.body))
        return g

    def lit(a: Formula, neg: bool) -> Formula:
        return Not(a) if neg else a

    def unnest_atom(a: Formula, neg: bool) -> Formula:
        a = _map_terms(a, rec)
        if isinstance(a, Comparison):
            l, r = a.left, a.right
            # move the non-simple side to the left
            if is_simple(l) and not is_simple(r):
                a = Comparison(r, SWAPPED_OP[a.op], l)
                l, r = a.left, a.right
            if is_simple(r):
                if isinstance(l, FuncApp) and a.op == "=" and all(map(is_simple, l.args)):
                    return lit(a, neg)
                if isinstance(l, Cardinality):
                    return lit(a, neg)
            if (pair_equalities and a.op in ("=", "!=") and isinstance(l, FuncApp)
                    and isinstance(r, FuncApp) and all(map(is_simple, l.args))
                    and all(map(is_simple, r.args)) and l.type == r.type):
                equal = (a.op == "=") != neg
                x = Var(fresh(), l.type)
                if equal:
                    body = And(Comparison(l, "=", x), Comparison(r, "=", x))
                    return Exists(x, rec(body))
                body = Or(Not(Comparison(l, "=", x)), Not(Comparison(r, "=", x)))
                return Forall(x, rec(body))
            if isinstance(l, Cardinality):
                target = _innermost(r)
            else:
                target = _innermost(l) or _innermost(r)
        else:
            target = next((t for t in map(_innermost, a.args) if t is not None), None)
        if target is None:
            return lit(a, neg)
        if isinstance(target, FuncApp):
            x = Var(fresh(), target.type)
            rest = unnest_atom(_atom_substitute(a, target, x), neg)
            return Forall(x, Or(Not(Comparison(target, "=", x)), rest))
        # a cardinality term in a position where it cannot stay
        n = _max_count(target, structure)
        options = []
        for k in range(n + 1):
            rest = unnest_atom(_atom_substitute(a, target, Int(k)), neg)
            options.append(And(Comparison(target, "=", Int(k)), rest))
        return disjunction(options)

    return rec(f)


# ------------------------------------------------------ function elimination


def _graph_atom(c: Comparison, renaming: dict[str, str]) -> PredAtom | None:
    if isinstance(c.left, FuncApp) and c.op == "=":
        return PredAtom(renaming[c.left.name], c.left.args + (c.right,))
    return None


def _eliminate(f: Formula, renaming: dict[str, str]) -> Formula:
    def body(g: Formula) -> Formula:
        return _eliminate(g, renaming)

    if isinstance(f, Comparison):
        f = _map_terms(f, body)
        return _graph_atom(f, renaming) or f
    if isinstance(f, PredAtom):
        return _map_terms(f, body)
    if isinstance(f, Not):
        return Not(_eliminate(f.body, renaming))
    if isinstance(f, (And, Or)):
        return type(f)(body(f.left), body(f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, body(f.body))
    return f


def exactness_sentence(name: str, typing: tuple[str, ...]) -> Formula:
    """``!x1..xn: #{y: P_F(x1..xn, y)} = 1``."""
    xs = [Var(f"x{i + 1}", t) for i, t in enumerate(typing[:-1])]
    y = Var("y", typing[-1])
    if any(x.name == "y" for x in xs):  # pragma: no cover - names above never clash
        raise AssertionError
    f: Formula = Comparison(Cardinality((y,), PredAtom(name, tuple(xs) + (y,))), "=", Int(1))
    for x in reversed(xs):
        f = Forall(x, f)
    return f


def eliminate_functions(m: NormalizedProblem | ModelExpansionProblem) -> NormalizedProblem:
    """Replace each function F by its graph predicate P_F.

    The graph predicate keeps the function's name (vocabulary namespaces are
    disjoint, so the name is free once F is removed).
    """
    v = m.vocabulary
    renaming = {fn: fn for fn in v.functions}
    preds = dict(v.predicates)
    for fn, (args, res) in v.functions.items():
        preds[renaming[fn]] = args + (res,)
    voc = Vocabulary(v.types, preds, {})
    s = m.structure
    rels = dict(s.predicates)
    for fn, table in s.functions.items():
        rels[renaming[fn]] = tuple(k + (val,) for k, val in table.items())
    structure = Structure(dict(s.types), rels, {})
    th = m.theory
    theory = Theory(
        tuple(_eliminate(f, renaming) for f in th.sentences),
        tuple(Definition(tuple(Rule(r.head, _eliminate(r.body, renaming)) for r in d.rules))
              for d in th.definitions),
    )
    old = getattr(m, "generated_constraints", ())
    gen = tuple(_eliminate(f, renaming) for f in old) + tuple(
        exactness_sentence(renaming[fn], preds[renaming[fn]]) for fn in v.functions)
    previous = dict(getattr(m, "function_renaming", {}))
    previous.update(renaming)
    return NormalizedProblem(voc, structure, theory, gen, previous)


# --------------------------------------------------- comparison negations


def push_comparison_negations(f: Formula) -> Formula:
    """Turn ``~(t op x)`` into ``t op' x`` with the complementary operator."""
    if isinstance(f, Not):
        if isinstance(f.body, Comparison):
            c = _map_terms(f.body, push_comparison_negations)
            return Comparison(c.left, NEGATED_OP[c.op], c.right)
        return Not(_map_terms(f.body, push_comparison_negations))
    if isinstance(f, (PredAtom, Comparison)):
        return _map_terms(f, push_comparison_negations)
    if isinstance(f, (And, Or)):
        return type(f)(push_comparison_negations(f.left), push_comparison_negations(f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, push_comparison_negations(f.body))
    return f


# ------------------------------------------------------------------ pipeline


def _normalize_formula(f: Formula, structure: Structure, pair: bool) -> Formula:
    return unnest_terms(to_nnf(f), structure, pair_equalities=pair)


def normalize(m: ModelExpansionProblem, pair_equalities: bool = True) -> NormalizedProblem:
    """Full normalization of a validated problem.

    ``pair_equalities`` (default on) shares one fresh variable between the two
    sides of an (in)equality of function applications; see :func:`unnest_terms`.
    """
    if isinstance(m, NormalizedProblem):
        m = m.as_problem()
    for d in m.theory.definitions:
        for r in d.rules:
            if not all(map(is_simple, r.head.args)):
                raise ValidationError(f"rule head {r.head.name} must have simple arguments")
    s = m.structure
    th = Theory(
        tuple(_normalize_formula(f, s, pair_equalities) for f in m.theory.sentences),
        tuple(Definition(tuple(Rule(r.head, _normalize_formula(r.body, s, pair_equalities))
                               for r in d.rules))
              for d in m.theory.definitions),
    )
    np_ = eliminate_functions(ModelExpansionProblem(m.vocabulary, s, th))
    out = NormalizedProblem(
        np_.vocabulary, np_.structure,
        Theory(tuple(push_comparison_negations(f) for f in np_.theory.sentences),
               tuple(Definition(tuple(Rule(r.head, push_comparison_negations(r.body))
                                      for r in d.rules))
                     for d in np_.theory.definitions)),
        tuple(push_comparison_negations(f) for f in np_.generated_constraints),
        np_.function_renaming,
    )
    check_normalized(out)
    return out


def normalization_violations(f: Formula) -> list[str]:
    """Structural problems that keep ``f`` from being in normal form."""
    problems: list[str] = []

    def term(t: Term, where: str) -> None:
        if isinstance(t, FuncApp):
            problems.append(f"function application {t.name} {where}")
        elif isinstance(t, Cardinality):
            problems.append(f"cardinality term {where}")
        elif isinstance(t, Var) and t.type is None:
            problems.append(f"untyped variable {t.name}")

    def form(g: Formula) -> None:
        if isinstance(g, PredAtom):
            for t in g.args:
                term(t, f"inside {g.name}")
        elif isinstance(g, Comparison):
            if isinstance(g.left, Cardinality):
                for v in g.left.vars:
                    if v.type is None:
                        problems.append(f"untyped variable {v.name}")
                form(g.left.body)
            else:
                term(g.left, "in a comparison")
            term(g.right, "on the right of a comparison")
        elif isinstance(g, Not):
            if not isinstance(g.body, PredAtom):
                problems.append("negation of a non-predicate formula")
            else:
                form(g.body)
        elif isinstance(g, (And, Or)):
            form(g.left)
            form(g.right)
        elif isinstance(g, (Forall, Exists)):
            if g.var.type is None:
                problems.append(f"untyped variable {g.var.name}")
            form(g.body)
        elif isinstance(g, (Implies, Iff)):
            problems.append(f"connective {type(g).__name__}")

    form(f)
    return problems


def check_normalized(m: NormalizedProblem) -> None:
    if m.vocabulary.functions or m.structure.functions:
        raise AssertionError("normalized problem still has function symbols")
    forms = list(m.theory.sentences) + list(m.generated_constraints)
    forms += [r.body for d in m.theory.definitions for r in d.rules]
    for f in forms:
        bad = normalization_violations(f)
        if bad:
            raise AssertionError(f"normal form violated: {bad[0]}")


# -------------------------------------------------------------- rectify


def rectify(f: Formula, taken: set[str]) -> Formula:
    """Rename bound variables so each binder is unique and distinct from ``taken``.

    Free variables keep their names.  ``taken`` is updated in place with
    every name used.
    """
    taken.update(v.name for v in free_variables(f))

    def new_name(name: str) -> str:
        if name not in taken:
            taken.add(name)
            return name
        for k in itertools.count(1):
            cand = f"{name}_{k}"
            if cand not in taken:
                taken.add(cand)
                return cand

    def term(t: Term, env: dict[str, Var]) -> Term:
        if isinstance(t, Var):
            return env.get(t.name, t)
        if isinstance(t, FuncApp):
            return replace(t, args=tuple(term(a, env) for a in t.args))
        if isinstance(t, Cardinality):
            inner = dict(env)
            vs = []
            for v in t.vars:
                nv = Var(new_name(v.name), v.type)
                inner[v.name] = nv
                vs.append(nv)
            return Cardinality(tuple(vs), form(t.body, inner))
        return t

    def form(g: Formula, env: dict[str, Var]) -> Formula:
        if isinstance(g, PredAtom):
            return PredAtom(g.name, tuple(term(a, env) for a in g.args))
        if isinstance(g, Comparison):
            return Comparison(term(g.left, env), g.op, term(g.right, env))
        if isinstance(g, Not):
            return Not(form(g.body, env))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(form(g.left, env), form(g.right, env))
        if isinstance(g, (Forall, Exists)):
            nv = Var(new_name(g.var.name), g.var.type)
            inner = dict(env)
            inner[g.var.name] = nv
            return type(g)(nv, form(g.body, inner))
        return g

    return form(f, {})


__all__ = [
    "NormalizedProblem", "to_nnf", "unnest_terms", "eliminate_functions",
    "push_comparison_negations", "normalize", "check_normalized", "rectify",
    "exactness_sentence", "normalization_violations",
]
