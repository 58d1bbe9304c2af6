"""Reference semantics for typed first-order logic with definitions.

Everything here is deliberately naive: formulas are evaluated by direct
recursion over the domain, definitions by an alternating fixpoint over their
full ground instantiation, and model expansion by trying every candidate.
Truth values are 0 (false), 1 (unknown) and 2 (true) so the same evaluator
serves two-valued structures and three-valued approximations.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator

import networkx as nx

from ..errors import CapExceeded, ThreeValuedError, ValidationError
from ..syntax import (
    And, Bool, Cardinality, Comparison, Definition, Elem, Exists, Forall, Formula, FuncApp,
    Iff, Implies, Int, ModelExpansionProblem, Not, Or, PredAtom, Structure, Term, Var,
    compare_values,
)
from ..validate import check_structure, validate_problem

FALSE, UNKNOWN, TRUE = 0, 1, 2

GroundAtom = tuple  # (predicate, args)
Lookup = Callable[[str, tuple], int]


class _Evaluator:
    def __init__(self, s: Structure, lookup: Lookup):
        self.s = s
        self.lookup = lookup

    def elements(self, v: Var):
        if v.type not in self.s.types:
            raise ValidationError(f"type {v.type} of variable {v.name} is not interpreted")
        return self.s.types[v.type]

    def term(self, t: Term, env: dict):
        """A concrete value, or a ``(lo, hi)`` interval for an undecided count."""
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Int):
            return t.value
        if isinstance(t, Elem):
            return t.name
        if isinstance(t, FuncApp):
            args = tuple(self.term(a, env) for a in t.args)
            if any(isinstance(a, range) for a in args):
                raise ValidationError("count inside a function argument")
            return self.s.functions[t.name][args]
        if isinstance(t, Cardinality):
            lo = hi = 0
            for values in itertools.product(*(self.elements(v) for v in t.vars)):
                inner = dict(env)
                inner.update((v.name, x) for v, x in zip(t.vars, values))
                val = self.value(t.body, inner)
                lo += val == TRUE
                hi += val != FALSE
            return lo if lo == hi else range(lo, hi + 1)
        raise TypeError(t)

    def value(self, f: Formula, env: dict) -> int:
        if isinstance(f, Bool):
            return TRUE if f.value else FALSE
        if isinstance(f, PredAtom):
            return self.lookup(f.name, tuple(self.term(a, env) for a in f.args))
        if isinstance(f, Comparison):
            left, right = self.term(f.left, env), self.term(f.right, env)
            ls = left if isinstance(left, range) else (left,)
            rs = right if isinstance(right, range) else (right,)
            seen = {compare_values(a, f.op, b) for a in ls for b in rs}
            return TRUE if seen == {True} else FALSE if seen == {False} else UNKNOWN
        if isinstance(f, Not):
            return TRUE - self.value(f.body, env)
        if isinstance(f, And):
            left = self.value(f.left, env)
            return FALSE if left == FALSE else min(left, self.value(f.right, env))
        if isinstance(f, Or):
            left = self.value(f.left, env)
            return TRUE if left == TRUE else max(left, self.value(f.right, env))
        if isinstance(f, Implies):
            return self.value(Or(Not(f.left), f.right), env)
        if isinstance(f, Iff):
            a, b = self.value(f.left, env), self.value(f.right, env)
            if UNKNOWN in (a, b):
                return UNKNOWN
            return TRUE if a == b else FALSE
        if isinstance(f, (Forall, Exists)):
            out = TRUE if isinstance(f, Forall) else FALSE
            for x in self.elements(f.var):
                inner = dict(env)
                inner[f.var.name] = x
                val = self.value(f.body, inner)
                out = min(out, val) if isinstance(f, Forall) else max(out, val)
                if out == (FALSE if isinstance(f, Forall) else TRUE):
                    break
            return out
        raise TypeError(f)


def _two_valued(s: Structure) -> Lookup:
    sets = {p: set(ts) for p, ts in s.predicates.items()}

    def lookup(name: str, args: tuple) -> int:
        if name not in sets:
            raise ValidationError(f"predicate {name} is not interpreted")
        return TRUE if args in sets[name] else FALSE

    return lookup


def eval_formula(s: Structure, f: Formula, assignment: dict | None = None) -> bool:
    """Classical truth of ``f`` in the total structure ``s``."""
    return _Evaluator(s, _two_valued(s)).value(f, dict(assignment or {})) == TRUE


def satisfying_tuples(s: Structure, f: Formula, variables) -> set[tuple]:
    """All assignments to ``variables`` (in order) under which ``f`` holds."""
    ev = _Evaluator(s, _two_valued(s))
    out = set()
    for values in itertools.product(*(ev.elements(v) for v in variables)):
        if ev.value(f, {v.name: x for v, x in zip(variables, values)}) == TRUE:
            out.add(values)
    return out


# ----------------------------------------------------------- definitions


def _head_instances(d: Definition, s: Structure):
    """Ground rule instances ``(atom, body, env)`` of a definition."""
    out = []
    for r in d.rules:
        head_vars: list[Var] = []
        for a in r.head.args:
            if isinstance(a, Var) and a.name not in {v.name for v in head_vars}:
                head_vars.append(a)
        for values in itertools.product(*(s.types[v.type] for v in head_vars)):
            env = {v.name: x for v, x in zip(head_vars, values)}
            args = tuple(env[a.name] if isinstance(a, Var) else
                         a.value if isinstance(a, Int) else a.name for a in r.head.args)
            out.append(((r.head.name, args), r.body, env))
    return out


def _defined_base(d: Definition, s: Structure, typings) -> set[GroundAtom]:
    base = set()
    for p in d.defined():
        for args in itertools.product(*(s.types[t] for t in typings[p])):
            base.add((p, args))
    return base


def well_founded_model(d: Definition, open_structure: Structure,
                       typings: dict[str, tuple[str, ...]] | None = None
                       ) -> dict[str, frozenset[tuple]]:
    """Two-valued well-founded model of ``d`` over the given open interpretation.

    The result maps each defined predicate to its set of true tuples.  Raises
    :class:`ThreeValuedError` when some defined atom stays undetermined.
    Open symbols are read from ``open_structure``; any interpretation it has
    for a defined predicate is ignored.
    """
    defined = set(d.defined())
    if typings is None:
        typings = {}
        for r in d.rules:
            typings.setdefault(r.head.name, tuple(_arg_type(a, open_structure)
                                                  for a in r.head.args))
    base = _defined_base(d, open_structure, typings)
    instances = _head_instances(d, open_structure)
    opens = _two_valued(open_structure)

    def operator(lower: set, upper: set) -> tuple[set, set]:
        def lookup(name, args):
            if name in defined:
                atom = (name, args)
                return TRUE if atom in lower else UNKNOWN if atom in upper else FALSE
            return opens(name, args)

        ev = _Evaluator(open_structure, lookup)
        certain, possible = set(), set()
        for atom, body, env in instances:
            val = ev.value(body, env)
            if val == TRUE:
                certain.add(atom)
            if val != FALSE:
                possible.add(atom)
        return certain, possible

    lower: set = set()
    upper: set = set(base)
    while True:
        # lower bound: least fixpoint with the upper bound fixed
        new_lower: set = set()
        while True:
            nxt = operator(new_lower, upper)[0]
            if nxt == new_lower:
                break
            new_lower = nxt
        # upper bound: least fixpoint from the new lower bound
        new_upper: set = set(new_lower)
        while True:
            nxt = operator(new_lower, new_upper)[1] | new_lower
            if nxt == new_upper:
                break
            new_upper = nxt
        if new_lower == lower and new_upper == upper:
            break
        lower, upper = new_lower, new_upper
    if lower != upper:
        raise ThreeValuedError(frozenset(lower), frozenset(upper - lower))
    out: dict[str, set] = {p: set() for p in d.defined()}
    for name, args in lower:
        out[name].add(args)
    return {p: frozenset(v) for p, v in out.items()}


def _arg_type(a: Term, s: Structure) -> str:
    if isinstance(a, Var):
        return a.type
    value = a.value if isinstance(a, Int) else a.name
    t = s.type_of(value)
    if t is None:
        raise ValidationError(f"element {value} belongs to no type")
    return t


# --------------------------------------------------------- model expansion


def _tuples(s: Structure, typing) -> list[tuple]:
    return list(itertools.product(*(s.types[t] for t in typing)))


def _relations(s: Structure, typing) -> Iterator[tuple]:
    space = _tuples(s, typing)
    for bits in itertools.product((False, True), repeat=len(space)):
        yield tuple(t for t, b in zip(space, bits) if b)


def _functions(s: Structure, args, res) -> Iterator[dict]:
    keys = _tuples(s, args)
    for values in itertools.product(s.types[res], repeat=len(keys)):
        yield dict(zip(keys, values))


def _definition_plan(m: ModelExpansionProblem):
    """Definitions in evaluation order, plus predicates that must be guessed.

    A predicate is guessed (and checked afterwards) when it is defined by more
    than one definition or by a definition that depends on itself through
    other definitions.
    """
    defs = m.theory.definitions
    owner: dict[str, list[int]] = {}
    for i, d in enumerate(defs):
        for p in d.defined():
            owner.setdefault(p, []).append(i)
    g = nx.DiGraph()
    g.add_nodes_from(range(len(defs)))
    for i, d in enumerate(defs):
        for sym in d.open_symbols():
            for j in owner.get(sym, ()):
                g.add_edge(j, i)
    guessed = {p for p, idx in owner.items() if len(idx) > 1}
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            for i in comp:
                guessed.update(defs[i].defined())
    cond = nx.condensation(g)
    plan = [i for c in nx.topological_sort(cond) for i in sorted(cond.nodes[c]["members"])]
    return plan, guessed


def search_space_size(m: ModelExpansionProblem) -> int:
    m = validate_problem(m)
    s, v = m.structure, m.vocabulary
    _, guessed = _definition_plan(m)
    defined = {p for d in m.theory.definitions for p in d.defined()}
    size = 1
    for p, typing in v.predicates.items():
        if p not in s.predicates and (p not in defined or p in guessed):
            size *= 2 ** len(_tuples(s, typing))
    for fn, (args, res) in v.functions.items():
        if fn not in s.functions:
            size *= len(s.types[res]) ** len(_tuples(s, args))
    return size


def _apply_definitions(m: ModelExpansionProblem, cand: Structure, plan, guessed) -> bool:
    """Fill in defined predicates of ``cand``; False if some value disagrees."""
    typings = m.vocabulary.predicates
    for i in plan:
        d = m.theory.definitions[i]
        wfm = well_founded_model(d, cand, typings)
        for p, tuples in wfm.items():
            if p in cand.predicates:
                if frozenset(cand.predicates[p]) != tuples:
                    return False
            else:
                cand.predicates[p] = tuple(sorted(tuples, key=repr))
    return True


def solve_bruteforce(m: ModelExpansionProblem, cap: int = 10 ** 6,
                     limit: int | None = None) -> set[Structure]:
    """Every total expansion of the structure that satisfies the theory."""
    m = validate_problem(m)
    s, v = m.structure, m.vocabulary
    size = search_space_size(m)
    if size > cap:
        raise CapExceeded(f"search space has {size} candidates, cap is {cap}")
    plan, guessed = _definition_plan(m)
    defined = {p for d in m.theory.definitions for p in d.defined()}
    free_preds = [p for p in v.predicates
                  if p not in s.predicates and (p not in defined or p in guessed)]
    free_funcs = [f for f in v.functions if f not in s.functions]
    options = [list(_relations(s, v.predicates[p])) for p in free_preds]
    options += [list(_functions(s, *v.functions[f])) for f in free_funcs]
    solutions: set[Structure] = set()
    for combo in itertools.product(*options):
        cand = s.copy()
        for p, rel in zip(free_preds, combo):
            cand.predicates[p] = rel
        for f, table in zip(free_funcs, combo[len(free_preds):]):
            cand.functions[f] = table
        if not _apply_definitions(m, cand, plan, guessed):
            continue
        if all(eval_formula(cand, f) for f in m.theory.sentences):
            solutions.add(_ordered(cand, v))
            if limit is not None and len(solutions) >= limit:
                break
    return solutions


def _ordered(s: Structure, v) -> Structure:
    """Put symbols in vocabulary order so printing is stable."""
    preds = {p: s.predicates[p] for p in v.predicates if p in s.predicates}
    funcs = {f: s.functions[f] for f in v.functions if f in s.functions}
    return Structure(dict(s.types), preds, funcs)


def expands(m: ModelExpansionProblem, s2: Structure) -> list[str]:
    """Reasons why ``s2`` is not a total expansion of the problem's structure."""
    s, v = m.structure, m.vocabulary
    problems = []
    if {t: frozenset(e) for t, e in s2.types.items()} != {
            t: frozenset(e) for t, e in s.types.items()}:
        problems.append("type interpretations differ")
    for p in v.predicates:
        if p not in s2.predicates:
            problems.append(f"{p} is not interpreted")
        elif p in s.predicates and frozenset(s.predicates[p]) != frozenset(s2.predicates[p]):
            problems.append(f"{p} differs from the given interpretation")
    for f in v.functions:
        if f not in s2.functions:
            problems.append(f"{f} is not interpreted")
        elif f in s.functions and s.functions[f] != s2.functions[f]:
            problems.append(f"{f} differs from the given interpretation")
    return problems


def check_model(m: ModelExpansionProblem, s2: Structure) -> bool:
    """Whether ``s2`` satisfies every sentence and agrees with every definition."""
    m = validate_problem(m)
    problems = expands(m, s2)
    if problems:
        raise ValidationError("structure does not expand the problem: " + "; ".join(problems))
    check_structure(m.vocabulary, s2)
    typings = m.vocabulary.predicates
    for d in m.theory.definitions:
        wfm = well_founded_model(d, s2, typings)
        for p, tuples in wfm.items():
            if frozenset(s2.predicates[p]) != tuples:
                return False
    return all(eval_formula(s2, f) for f in m.theory.sentences)
