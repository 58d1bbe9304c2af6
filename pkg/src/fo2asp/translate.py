"""Translation of normalized model-expansion problems to ASP-Core-2.

The program is built from four blocks, emitted in this order:

* ``alpha1``: a choice rule for every uninterpreted predicate, followed by the
  reification of the exactness sentences of eliminated functions;
* ``alpha2``: facts for the structure, types read as unary predicates;
* ``alpha3``: reification rule and constraint for every sentence;
* ``alpha4``: the merged definition, followed by the equivalence
  constraints linking each defined predicate to its renamed copy.

Formulas are translated by :meth:`Translator.formula`, which returns a rule
body and appends any auxiliary ``delta_k`` rules it needs to a block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx

from .asp import (
    AggregateElement, AspProgram, AspRule, Atom, BodyElement, BuiltinComparison,
    CountAggregate, Literal, Variable,
)
from .errors import TranslationError
from .normalize import NormalizedProblem, normalize, rectify
from .syntax import (
    And, Bool, Cardinality, Comparison, Definition, Elem, Exists, Forall, Formula, Int,
    ModelExpansionProblem, Not, Or, PredAtom, Rule, Structure, Term, Theory, Var,
    format_formula, free_variables,
)
from .validate import validate_problem

RESERVED = frozenset({"not"})


def _lower_first(name: str) -> str:
    return name[:1].lower() + name[1:]


def _upper_first(name: str) -> str:
    return name[:1].upper() + name[1:]


class NameMap:
    """Injective map from problem symbols to ASP identifiers.

    Types, predicates and named elements share one lowercase namespace;
    collisions get a numeric suffix.  Variables live in their own uppercase
    namespace.  Integers are passed through unchanged.
    """

    def __init__(self):
        self.symbols: dict[tuple[str, str], str] = {}
        self.inverse: dict[str, tuple[str, str]] = {}
        self.variables: dict[str, str] = {}
        self._var_taken: set[str] = set()
        self.aux: set[str] = set()
        self.counter = 0

    def _claim(self, base: str, taken) -> str:
        cand, k = base, 0
        while cand in taken or cand in RESERVED:
            k += 1
            cand = f"{base}_{k}"
        return cand

    def register(self, kind: str, name: str, aux: bool = False) -> str:
        key = (kind, name)
        if key not in self.symbols:
            ident = self._claim(_lower_first(name), self.inverse)
            self.symbols[key] = ident
            self.inverse[ident] = key
            if aux:
                self.aux.add(ident)
        return self.symbols[key]

    def mangle(self, kind: str, name):
        """Identifier for a symbol, element or variable (registering it if new)."""
        if kind == "variable":
            return self.variable(name)
        if kind == "element" and isinstance(name, int):
            return name
        return self.register(kind, name)

    def type(self, name: str) -> str:
        return self.register("type", name)

    def predicate(self, name: str) -> str:
        return self.register("predicate", name)

    def element(self, e):
        return e if isinstance(e, int) else self.register("element", e)

    def variable(self, name: str) -> str:
        if name not in self.variables:
            ident = self._claim(_upper_first(name), self._var_taken)
            self.variables[name] = ident
            self._var_taken.add(ident)
        return self.variables[name]

    def fresh_delta(self) -> str:
        while True:
            self.counter += 1
            ident = f"delta_{self.counter}"
            if ident not in self.inverse and ident not in RESERVED:
                self.inverse[ident] = ("delta", ident)
                self.aux.add(ident)
                return ident

    def lookup(self, ident: str) -> tuple[str, str] | None:
        return self.inverse.get(ident)

    def is_aux(self, ident: str) -> bool:
        return ident in self.aux


@dataclass
class TranslationOutput:
    program: AspProgram
    name_map: NameMap
    stats: dict[str, int]
    universal_counts: dict[str, int]
    normalized: NormalizedProblem
    renaming: dict[str, str] = field(default_factory=dict)  # renamed copy -> defined predicate
    blocks: dict[str, list[AspRule]] = field(default_factory=dict)


@dataclass
class MergedTheory:
    theory: Theory
    equivalences: list[tuple[str, str]]  # (P, P_delta)
    typings: dict[str, tuple[str, ...]]


def rename_predicates(f: Formula, mapping: dict[str, str]) -> Formula:
    def term(t: Term) -> Term:
        if isinstance(t, Cardinality):
            return Cardinality(t.vars, rename_predicates(t.body, mapping))
        return t

    if isinstance(f, PredAtom):
        return PredAtom(mapping.get(f.name, f.name), tuple(term(a) for a in f.args))
    if isinstance(f, Comparison):
        return Comparison(term(f.left), f.op, term(f.right))
    if isinstance(f, Not):
        return Not(rename_predicates(f.body, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(rename_predicates(f.left, mapping), rename_predicates(f.right, mapping))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, rename_predicates(f.body, mapping))
    return f


def merge_definitions(theory: Theory, typings: dict[str, tuple[str, ...]],
                      taken: set[str] | None = None) -> MergedTheory:
    """Rename the defined predicates of every definition and merge them into one.

    Definition ``k`` (1-based) renames its defined predicate ``P`` to
    ``P_d<k>``.  The result keeps the sentences, holds a single definition
    (or none) and records the pairs ``(P, P_d<k>)`` that must be equivalent.
    """
    taken = set(taken or ()) | set(typings)
    typings = dict(typings)
    rules: list[Rule] = []
    equivalences: list[tuple[str, str]] = []
    for k, d in enumerate(theory.definitions, start=1):
        mapping = {}
        for p in d.defined():
            name, j = f"{p}_d{k}", 0
            while name in taken:
                j += 1
                name = f"{p}_d{k}_{j}"
            taken.add(name)
            mapping[p] = name
            typings[name] = typings[p]
            equivalences.append((p, name))
        for r in d.rules:
            head = PredAtom(mapping[r.head.name], r.head.args)
            rules.append(Rule(head, rename_predicates(r.body, mapping)))
    defs = (Definition(tuple(rules)),) if rules else ()
    return MergedTheory(Theory(theory.sentences, defs), equivalences, typings)


def _dedup(items) -> list:
    seen = set()
    out = []
    for i in items:
        if i not in seen:
            seen.add(i)
            out.append(i)
    return out


def _needs_rule(f: Formula) -> bool:
    """Whether the translation of ``f`` contains an aggregate at top level.

    Such a body cannot be inlined into an aggregate element and gets its own
    auxiliary predicate instead.
    """
    if isinstance(f, Forall):
        return True
    if isinstance(f, Comparison):
        return isinstance(f.left, Cardinality)
    if isinstance(f, And):
        return _needs_rule(f.left) or _needs_rule(f.right)
    if isinstance(f, Exists):
        return _needs_rule(f.body)
    return False


class Translator:
    """Formula and rule translation against a fixed structure and name map."""

    def __init__(self, structure: Structure, typings: dict[str, tuple[str, ...]],
                 nm: NameMap | None = None):
        self.s = structure
        self.typings = typings
        self.nm = nm or NameMap()
        self.universal_counts: dict[str, int] = {}
        self.out: list[AspRule] = []

    # ------------------------------------------------------------ pieces

    def term(self, t: Term):
        if isinstance(t, Var):
            return Variable(self.nm.variable(t.name))
        if isinstance(t, Int):
            return t.value
        if isinstance(t, Elem):
            return self.nm.element(t.name)
        raise TranslationError(f"term {t} is not simple; normalize first")

    def guard(self, v: Var) -> Literal:
        if v.type is None:
            raise TranslationError(f"variable {v.name} has no type")
        return Literal(Atom(self.nm.type(v.type), (Variable(self.nm.variable(v.name)),)))

    def guards(self, terms) -> list[Literal]:
        return [self.guard(t) for t in terms if isinstance(t, Var)]

    def atom(self, name: str, args) -> Atom:
        return Atom(self.nm.predicate(name), tuple(self.term(a) for a in args))

    def size(self, type_name: str) -> int:
        if type_name not in self.s.types:
            raise TranslationError(f"type {type_name} is not interpreted by the structure")
        return len(self.s.types[type_name])

    def delta_atom(self, name: str, vs) -> Atom:
        return Atom(name, tuple(Variable(self.nm.variable(v.name)) for v in vs))

    def emit(self, head: Atom | None, body, choice: bool = False) -> AspRule:
        r = AspRule(head, tuple(_dedup(body)), choice)
        self.out.append(r)
        return r

    # ---------------------------------------------------------- formulas

    def formula(self, f: Formula) -> list[BodyElement]:
        """Body translation of a normalized formula; side rules go to ``self.out``."""
        if isinstance(f, Bool):
            return [] if f.value else [BuiltinComparison(0, "=", 1)]
        if isinstance(f, PredAtom):
            return [Literal(self.atom(f.name, f.args))] + self.guards(f.args)
        if isinstance(f, Not):
            if not isinstance(f.body, PredAtom):
                raise TranslationError("negation may only apply to predicate atoms")
            a = f.body
            return [Literal(self.atom(a.name, a.args), False)] + self.guards(a.args)
        if isinstance(f, Comparison):
            if isinstance(f.left, Cardinality):
                return self.cardinality(f.left, f.op, f.right)
            return ([BuiltinComparison(self.term(f.left), f.op, self.term(f.right))]
                    + self.guards((f.left, f.right)))
        if isinstance(f, And):
            return _dedup(self.formula(f.left) + self.formula(f.right))
        if isinstance(f, Or):
            vs = free_variables(f)
            name = self.nm.fresh_delta()
            for branch in (f.left, f.right):
                self.emit(self.delta_atom(name, vs), self.formula(branch) + self.guards(vs))
            return [Literal(self.delta_atom(name, vs))]
        if isinstance(f, Exists):
            return _dedup(self.formula(f.body) + [self.guard(f.var)])
        if isinstance(f, Forall):
            vs, body = [], f
            while isinstance(body, Forall):
                vs.append(body.var)
                body = body.body
            n = math.prod(self.size(v.type) for v in vs)
            self.universal_counts[format_formula(f)] = n
            return self.cardinality(Cardinality(tuple(vs), body), "=", Int(n))
        raise TranslationError(f"cannot translate {type(f).__name__}")

    def cardinality(self, c: Cardinality, op: str, bound: Term) -> list[BodyElement]:
        outer = free_variables(c)
        local = [Variable(self.nm.variable(v.name)) for v in c.vars]
        if _needs_rule(c.body):
            vs = tuple(c.vars) + tuple(outer)
            name = self.nm.fresh_delta()
            inner = self.formula(c.body)
            self.emit(self.delta_atom(name, vs), inner + self.guards(vs))
            cond = [Literal(self.delta_atom(name, vs))] + self.guards(c.vars)
        else:
            cond = self.formula(c.body) + self.guards(c.vars)
        element = AggregateElement(tuple(local), tuple(_dedup(cond)))
        agg = CountAggregate((element,), op, self.term(bound))
        return [agg] + self.guards(outer) + self.guards((bound,))

    # ------------------------------------------------------- statements

    def reify(self, f: Formula, vs=None) -> str:
        """Add ``delta(vs) :- alpha3(f), guards(vs)`` and return the delta name."""
        vs = tuple(free_variables(f) if vs is None else vs)
        name = self.nm.fresh_delta()
        self.emit(self.delta_atom(name, vs), self.formula(f) + self.guards(vs))
        return name

    def sentence(self, f: Formula) -> None:
        if free_variables(f):
            raise TranslationError(f"sentence has free variables: {format_formula(f)}")
        name = self.reify(f, ())
        self.emit(None, [Literal(Atom(name), False)])

    def choice(self, pred: str) -> None:
        typing = self.typings[pred]
        vs = [Var(f"x{i + 1}", t) for i, t in enumerate(typing)]
        self.emit(self.atom(pred, vs), self.guards(vs), choice=True)

    def facts(self, s: Structure) -> None:
        for t, elems in s.types.items():
            for e in elems:
                self.emit(Atom(self.nm.type(t), (self.nm.element(e),)), [])
        for p, tuples in s.predicates.items():
            for tup in tuples:
                self.emit(Atom(self.nm.predicate(p), tuple(self.nm.element(e) for e in tup)), [])

    def rule(self, r: Rule) -> None:
        head = self.atom(r.head.name, r.head.args)
        self.emit(head, self.formula(r.body) + self.guards(r.head.args))

    def equivalence(self, p: str, copy: str) -> None:
        vs = [Var(f"x{i + 1}", t) for i, t in enumerate(self.typings[p])]
        a, b = self.atom(p, vs), self.atom(copy, vs)
        g = self.guards(vs)
        self.emit(None, [Literal(a), Literal(b, False)] + g)
        self.emit(None, [Literal(a, False), Literal(b)] + g)

    def take(self) -> list[AspRule]:
        out, self.out = self.out, []
        return out


def _register_symbols(nm: NameMap, m: NormalizedProblem) -> None:
    for t in m.vocabulary.types:
        nm.type(t)
    for p in m.vocabulary.predicates:
        nm.predicate(p)
    for elems in m.structure.types.values():
        for e in elems:
            nm.element(e)


def _check_stratified(rules: list[AspRule], nm: NameMap) -> None:
    """The auxiliary predicates of sentence reification must not depend on themselves."""
    g = nx.DiGraph()
    for r in rules:
        if r.head is None or not nm.is_aux(r.head.predicate):
            continue
        g.add_node(r.head.predicate)
        for b in r.body:
            atoms = []
            if isinstance(b, Literal):
                atoms.append(b.atom)
            elif isinstance(b, CountAggregate):
                atoms += [c.atom for e in b.elements for c in e.condition if isinstance(c, Literal)]
            for a in atoms:
                if nm.is_aux(a.predicate):
                    g.add_edge(r.head.predicate, a.predicate)
    if not nx.is_directed_acyclic_graph(g):
        raise TranslationError("reification rules are not stratified")


def translate(m: ModelExpansionProblem | NormalizedProblem,
              pair_equalities: bool = True) -> TranslationOutput:
    """Translate a problem to an ASP program whose answer sets are its solutions."""
    if isinstance(m, NormalizedProblem):
        norm = m
    else:
        norm = normalize(validate_problem(m), pair_equalities=pair_equalities)
    nm = NameMap()
    _register_symbols(nm, norm)

    taken = set(norm.vocabulary.symbols())
    taken |= {e for e in norm.structure.domain if isinstance(e, str)}
    merged = merge_definitions(norm.theory, norm.vocabulary.predicates, taken)
    for _, copy in merged.equivalences:
        nm.register("predicate", copy, aux=True)

    tr = Translator(norm.structure, merged.typings, nm)
    interpreted = norm.structure.interpreted()

    for p in norm.vocabulary.predicates:
        if p not in interpreted:
            tr.choice(p)
    for f in norm.generated_constraints:
        tr.sentence(rectify(f, set()))
    alpha1 = tr.take()

    tr.facts(norm.structure)
    alpha2 = tr.take()

    for f in merged.theory.sentences:
        tr.sentence(rectify(f, set()))
    alpha3 = tr.take()
    _check_stratified(alpha1 + alpha3, nm)

    for d in merged.theory.definitions:
        for r in d.rules:
            taken_vars = {a.name for a in r.head.args if isinstance(a, Var)}
            tr.rule(Rule(r.head, rectify(r.body, taken_vars)))
    for p, copy in merged.equivalences:
        tr.equivalence(p, copy)
    alpha4 = tr.take()

    blocks = {"alpha1": alpha1, "alpha2": alpha2, "alpha3": alpha3, "alpha4": alpha4}
    program = AspProgram(alpha1 + alpha2 + alpha3 + alpha4)
    return TranslationOutput(
        program=program,
        name_map=nm,
        stats={k: len(v) for k, v in blocks.items()},
        universal_counts=tr.universal_counts,
        normalized=norm,
        renaming={copy: p for p, copy in merged.equivalences},
        blocks=blocks,
    )


def alpha1(m: NormalizedProblem, nm: NameMap | None = None) -> list[AspRule]:
    """Choice rules for the uninterpreted predicates of ``m``."""
    tr = Translator(m.structure, m.vocabulary.predicates, nm)
    for p in m.vocabulary.predicates:
        if p not in m.structure.interpreted():
            tr.choice(p)
    return tr.take()


def alpha2(s: Structure, nm: NameMap | None = None) -> list[AspRule]:
    tr = Translator(s, {}, nm)
    tr.facts(s)
    return tr.take()


def alpha4(d: Definition, structure: Structure, typings: dict[str, tuple[str, ...]],
           nm: NameMap | None = None) -> list[AspRule]:
    """Rules for a definition as given, without any renaming."""
    tr = Translator(structure, typings, nm)
    for r in d.rules:
        taken = {a.name for a in r.head.args if isinstance(a, Var)}
        tr.rule(Rule(r.head, rectify(r.body, taken)))
    return tr.take()


@dataclass
class SubformulaProgram:
    """Reification rules for every subformula of one sentence."""

    rules: list[AspRule]
    deltas: list[tuple[Formula, str, tuple[Var, ...]]]  # subformula, predicate, arguments
    name_map: NameMap


def subformulas(f: Formula):
    """Pre-order walk including the bodies of cardinality terms."""
    yield f
    if isinstance(f, Comparison) and isinstance(f.left, Cardinality):
        yield from subformulas(f.left.body)
    elif isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from subformulas(f.body)


def reify_subformulas(f: Formula, structure: Structure,
                      typings: dict[str, tuple[str, ...]]) -> SubformulaProgram:
    """One reification rule per subformula of a normalized sentence ``f``.

    Together with the facts of ``structure`` the rules have a single stable
    model in which the extension of each reification predicate is the set of
    satisfying tuples of its subformula.
    """
    f = rectify(f, set())
    nm = NameMap()
    for t in structure.types:
        nm.type(t)
    for p in typings:
        nm.predicate(p)
    for e in structure.domain:
        nm.element(e)
    tr = Translator(structure, typings, nm)
    deltas = []
    for sub in subformulas(f):
        vs = free_variables(sub)
        deltas.append((sub, tr.reify(sub, vs), vs))
    return SubformulaProgram(tr.take(), deltas, nm)
