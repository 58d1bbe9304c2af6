"""Reference grounder and stable-model enumerator for the emitted ASP fragment.

``ground`` instantiates rules by joining their positive body literals
against the atoms that can possibly be derived (facts, then heads of rules
whose positive bodies can be matched), so instances that could never fire
are left out.  Nothing else is simplified.

``stable_models`` splits the ground program along the strongly connected
components of its atom dependency graph and handles one component at a time
in dependency order.  A component whose atoms only depend on each other
positively has exactly one candidate, its least fixpoint.  Any other component
is solved by trying every subset ``J`` of its atoms and keeping those for which
the least model of the reduct with respect to ``J`` is ``J`` itself.

Choice rules ``{h} :- B`` behave as ``h :- B, not h'`` / ``h' :- B, not h``
with ``h'`` projected away: in the reduct they derive ``h`` only when ``h`` is
in the candidate.  Count aggregates are split into a monotone part (``>=``,
``>``, evaluated on the atoms derived so far) and an antimonotone part
(``<=``, ``<``, evaluated on the candidate); ``=`` uses both and ``!=`` is
evaluated on the candidate.  Negative literals are evaluated on the candidate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import networkx as nx

from ..asp import (
    AggregateElement, AspProgram, AspRule, Atom, BuiltinComparison, CountAggregate, Literal,
    Variable, rule_vars,
)
from ..errors import CapExceeded, TranslationError
from ..syntax import compare_values

# ------------------------------------------------------------------ grounding


def _unify(atom: Atom, args: tuple, binding: dict) -> dict | None:
    if len(atom.args) != len(args):
        return None
    out = binding
    for pattern, value in zip(atom.args, args):
        if isinstance(pattern, Variable):
            bound = out.get(pattern.name, _MISSING)
            if bound is _MISSING:
                if out is binding:
                    out = dict(binding)
                out[pattern.name] = value
            elif bound != value:
                return None
        elif pattern != value:
            return None
    return out


_MISSING = object()


def _subst_term(t, binding: dict):
    if isinstance(t, Variable):
        if t.name not in binding:
            raise TranslationError(f"unsafe variable {t.name}")
        return binding[t.name]
    return t


def _subst_atom(a: Atom, binding: dict) -> Atom:
    return Atom(a.predicate, tuple(_subst_term(t, binding) for t in a.args))


def _vars_of(t) -> set[str]:
    return {t.name} if isinstance(t, Variable) else set()


class _Index:
    def __init__(self):
        self.by_pred: dict[tuple[str, int], set[tuple]] = {}

    def add(self, a: Atom) -> bool:
        rows = self.by_pred.setdefault((a.predicate, len(a.args)), set())
        if a.args in rows:
            return False
        rows.add(a.args)
        return True

    def rows(self, a: Atom) -> Iterable[tuple]:
        return self.by_pred.get((a.predicate, len(a.args)), ())

    def __contains__(self, a: Atom) -> bool:
        return a.args in self.by_pred.get((a.predicate, len(a.args)), ())


def _matches(conds, index: _Index, binding: dict) -> Iterator[dict]:
    """Bindings that satisfy the positive literals and comparisons of ``conds``.

    Negative literals and aggregates are ignored here.  Comparisons are
    checked as soon as their variables are bound.
    """
    positives = [c.atom for c in conds if isinstance(c, Literal) and c.positive]
    comparisons = [c for c in conds if isinstance(c, BuiltinComparison)]

    def ready(c, b):
        return (_vars_of(c.left) | _vars_of(c.right)) <= b.keys()

    def check(b, pending):
        rest = []
        for c in pending:
            if ready(c, b):
                if not compare_values(_subst_term(c.left, b), c.op, _subst_term(c.right, b)):
                    return None
            else:
                rest.append(c)
        return rest

    def go(i, b, pending):
        pending = check(b, pending)
        if pending is None:
            return
        if i == len(positives):
            if pending:
                raise TranslationError("comparison with an unbound variable")
            yield b
            return
        atom = positives[i]
        for row in list(index.rows(atom)):
            nb = _unify(atom, row, b)
            if nb is not None:
                yield from go(i + 1, nb, pending)

    yield from go(0, binding, comparisons)


def _ground_aggregate(agg: CountAggregate, index: _Index, binding: dict) -> CountAggregate:
    elements = []
    seen = set()
    for e in agg.elements:
        for b in _matches(e.condition, index, binding):
            terms = tuple(_subst_term(t, b) for t in e.terms)
            cond = tuple(Literal(_subst_atom(c.atom, b), c.positive)
                         for c in e.condition if isinstance(c, Literal))
            key = (terms, cond)
            if key not in seen:
                seen.add(key)
                elements.append(AggregateElement(terms, cond))
    return CountAggregate(tuple(elements), agg.op, _subst_term(agg.bound, binding))


def _instances(r: AspRule, index: _Index) -> Iterator[AspRule]:
    literals = [b for b in r.body if not isinstance(b, CountAggregate)]
    for b in _matches(literals, index, {}):
        body = []
        for el in r.body:
            if isinstance(el, Literal):
                body.append(Literal(_subst_atom(el.atom, b), el.positive))
            elif isinstance(el, CountAggregate):
                body.append(_ground_aggregate(el, index, b))
        head = _subst_atom(r.head, b) if r.head is not None else None
        yield AspRule(head, tuple(body), r.choice)


def ground(p: AspProgram | Iterable[AspRule]) -> AspProgram:
    """Variable-free instances of every rule that can possibly fire.

    Ground comparisons are evaluated away; every other literal is kept.  A
    program without variables is returned as it is.
    """
    rules = list(p)
    if not any(rule_vars(r) for r in rules):
        return AspProgram(rules)
    index = _Index()
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.head is None:
                continue
            for inst in _instances(r, index):
                if index.add(inst.head):
                    changed = True
    out: list[AspRule] = []
    seen = set()
    for r in rules:
        for inst in _instances(r, index):
            if inst not in seen:
                seen.add(inst)
                out.append(inst)
    return AspProgram(out)


# -------------------------------------------------------------- stable models


@dataclass(frozen=True)
class _Agg:
    elements: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]  # tuple id, pos, neg
    op: str
    bound: object


@dataclass(frozen=True)
class _Rule:
    head: int | None
    choice: bool
    pos: tuple[int, ...]
    neg: tuple[int, ...]
    aggs: tuple[_Agg, ...]

    def atoms(self) -> set[int]:
        out = set(self.pos) | set(self.neg)
        for a in self.aggs:
            for _, pos, neg in a.elements:
                out |= set(pos) | set(neg)
        return out

    def nonmonotone_atoms(self) -> set[int]:
        out = set(self.neg)
        for a in self.aggs:
            for _, pos, neg in a.elements:
                out |= set(neg)
                if a.op not in (">=", ">"):
                    out |= set(pos)
        return out


class _Compiled:
    def __init__(self, p: Iterable[AspRule]):
        self.atoms: list[Atom] = []
        self.index: dict[Atom, int] = {}
        self.rules: list[_Rule] = []
        for r in p:
            if r.head is not None and not r.head.is_ground():
                raise TranslationError(f"rule is not ground: {r}")
            head = self.atom_id(r.head) if r.head is not None else None
            pos, neg, aggs = [], [], []
            for b in r.body:
                if isinstance(b, Literal):
                    (pos if b.positive else neg).append(self.atom_id(b.atom))
                elif isinstance(b, CountAggregate):
                    aggs.append(self.aggregate(b))
                elif isinstance(b, BuiltinComparison):
                    if isinstance(b.left, Variable) or isinstance(b.right, Variable):
                        raise TranslationError(f"rule is not ground: {r}")
                    if not compare_values(b.left, b.op, b.right):
                        break
            else:
                self.rules.append(_Rule(head, r.choice, tuple(pos), tuple(neg), tuple(aggs)))

    def atom_id(self, a: Atom) -> int:
        if not a.is_ground():
            raise TranslationError(f"atom is not ground: {a}")
        if a not in self.index:
            self.index[a] = len(self.atoms)
            self.atoms.append(a)
        return self.index[a]

    def aggregate(self, agg: CountAggregate) -> _Agg:
        if isinstance(agg.bound, Variable) or not isinstance(agg.bound, int):
            raise TranslationError(f"aggregate bound must be an integer: {agg}")
        tuples: dict[tuple, int] = {}
        elements = []
        for e in agg.elements:
            if any(isinstance(t, Variable) for t in e.terms):
                raise TranslationError(f"aggregate is not ground: {agg}")
            tid = tuples.setdefault(e.terms, len(tuples))
            pos, neg = [], []
            ok = True
            for c in e.condition:
                if isinstance(c, Literal):
                    (pos if c.positive else neg).append(self.atom_id(c.atom))
                elif not compare_values(c.left, c.op, c.right):
                    ok = False
            if ok:
                elements.append((tid, tuple(pos), tuple(neg)))
        op = agg.op
        if op == "=" and agg.bound == len({e[0] for e in elements}):
            # the bound is the largest possible count, so "=" is monotone
            op = ">="
        return _Agg(tuple(elements), op, agg.bound)


def _count(agg: _Agg, pos_in: set[int], neg_in: set[int]) -> int:
    hit = set()
    for tid, pos, neg in agg.elements:
        if tid not in hit and all(a in pos_in for a in pos) and not any(a in neg_in for a in neg):
            hit.add(tid)
    return len(hit)


def _agg_holds(agg: _Agg, current: set[int], candidate: set[int]) -> bool:
    op, k = agg.op, agg.bound
    if op in (">=", ">"):
        return compare_values(_count(agg, current, candidate), op, k)
    if op in ("<=", "<", "!="):
        return compare_values(_count(agg, candidate, candidate), op, k)
    # "=": at least k so far, at most k in the candidate
    return (_count(agg, current, candidate) >= k
            and _count(agg, candidate, candidate) <= k)


def _body_holds(r: _Rule, current: set[int], candidate: set[int]) -> bool:
    return (all(a in current for a in r.pos)
            and not any(a in candidate for a in r.neg)
            and all(_agg_holds(g, current, candidate) for g in r.aggs))


def _least_model(rules: list[_Rule], decided: set[int], candidate: set[int]) -> set[int]:
    """Least set of heads derivable from ``rules`` on top of ``decided``."""
    derived: set[int] = set()
    changed = True
    while changed:
        changed = False
        current = decided | derived
        for r in rules:
            if r.head in derived:
                continue
            if r.choice and r.head not in candidate:
                continue
            if _body_holds(r, current, candidate):
                derived.add(r.head)
                current.add(r.head)
                changed = True
    return derived


@dataclass
class _Component:
    atoms: tuple[int, ...]
    rules: list[_Rule]
    deterministic: bool
    constraints: list[_Rule]


def _plan(c: _Compiled) -> list[_Component]:
    g = nx.DiGraph()
    g.add_nodes_from(range(len(c.atoms)))
    internal_kind: dict[tuple[int, int], bool] = {}
    for r in c.rules:
        if r.head is None:
            continue
        for a in r.atoms():
            g.add_edge(r.head, a)
        for a in r.nonmonotone_atoms():
            internal_kind[(r.head, a)] = True
    cond = nx.condensation(g)
    members = {n: tuple(sorted(cond.nodes[n]["members"])) for n in cond.nodes}
    comp_of = cond.graph["mapping"]

    # post-order from the constraints first, so they can be checked early
    order: list[int] = []
    done: set[int] = set()

    def visit(n: int) -> None:
        stack = [(n, iter(sorted(cond.successors(n))))]
        done.add(n)
        while stack:
            node, it = stack[-1]
            nxt = next((s for s in it if s not in done), None)
            if nxt is None:
                order.append(node)
                stack.pop()
            else:
                done.add(nxt)
                stack.append((nxt, iter(sorted(cond.successors(nxt)))))

    constraints = [r for r in c.rules if r.head is None]
    for r in constraints:
        for a in sorted(r.atoms()):
            if comp_of[a] not in done:
                visit(comp_of[a])
    for n in reversed(list(nx.topological_sort(cond))):
        if n not in done:
            visit(n)

    position = {n: i for i, n in enumerate(order)}
    rules_by_comp: dict[int, list[_Rule]] = {n: [] for n in order}
    for r in c.rules:
        if r.head is not None:
            rules_by_comp[comp_of[r.head]].append(r)
    checks: dict[int, list[_Rule]] = {n: [] for n in order}
    ready: list[_Rule] = []
    for r in constraints:
        atoms = r.atoms()
        if not atoms:
            ready.append(r)
        else:
            last = max(position[comp_of[a]] for a in atoms)
            checks[order[last]].append(r)

    plan = []
    for n in order:
        atoms = members[n]
        inside = set(atoms)
        rules = rules_by_comp[n]
        deterministic = not any(r.choice for r in rules) and not any(
            internal_kind.get((r.head, a)) for r in rules for a in r.atoms() & inside)
        plan.append(_Component(atoms, rules, deterministic, checks[n]))
    if ready:
        plan.insert(0, _Component((), [], True, ready))
    return plan


def _violated(constraints: list[_Rule], model: set[int]) -> bool:
    return any(_body_holds(r, model, model) for r in constraints)


def _candidates(comp: _Component, decided: set[int], cap: int) -> Iterator[set[int]]:
    if comp.deterministic:
        yield _least_model(comp.rules, decided, decided)
        return
    # only atoms that head some rule with a possibly true body can be in J
    heads = sorted({r.head for r in comp.rules})
    if 2 ** len(heads) > cap:
        raise CapExceeded(f"component with {len(heads)} atoms exceeds the cap of {cap}")
    for bits in itertools.product((False, True), repeat=len(heads)):
        cand = {a for a, b in zip(heads, bits) if b}
        full = decided | cand
        if _least_model(comp.rules, decided, full) == cand:
            yield cand


def stable_models(p: AspProgram | Iterable[AspRule], cap: int = 2 ** 22,
                  limit: int | None = None) -> list[frozenset[Atom]]:
    """All stable models of a ground program, in a deterministic order."""
    c = _Compiled(p)
    plan = _plan(c)
    out: list[frozenset[Atom]] = []

    def search(i: int, model: set[int]) -> bool:
        if i == len(plan):
            out.append(frozenset(c.atoms[a] for a in model))
            return limit is not None and len(out) >= limit
        comp = plan[i]
        for cand in _candidates(comp, model, cap):
            nxt = model | cand
            if _violated(comp.constraints, nxt):
                continue
            if search(i + 1, nxt):
                return True
        return False

    search(0, set())
    return out


def solve(p: AspProgram, cap: int = 2 ** 22, limit: int | None = None) -> list[frozenset[Atom]]:
    """Ground ``p`` and enumerate its stable models."""
    return stable_models(ground(p), cap=cap, limit=limit)
