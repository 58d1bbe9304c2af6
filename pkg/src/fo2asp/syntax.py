"""Abstract syntax for typed first-order logic with definitions and cardinalities.

Terms and formulas are frozen dataclasses so they can be hashed, compared
structurally and used as dictionary keys.  Domain elements are plain Python
values: ``int`` for integer-named elements, ``str`` for everything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

Element = Union[int, str]

#: Canonical comparison operators.  The input grammar spells ``!=`` as ``~=``
#: and ``<=`` as ``=<``.
COMPARISON_OPS = ("=", "!=", "<=", ">=", "<", ">")
ORDERING_OPS = ("<=", ">=", "<", ">")

NEGATED_OP = {"=": "!=", "!=": "=", "<=": ">", ">": "<=", ">=": "<", "<": ">="}
SWAPPED_OP = {"=": "=", "!=": "!=", "<=": ">=", ">=": "<=", "<": ">", ">": "<"}


def element_key(e: Element):
    """Total order on elements: integers first (numerically), then names."""
    return (0, e, "") if isinstance(e, int) else (1, 0, e)


def compare_values(left: Element, op: str, right: Element) -> bool:
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    lk, rk = element_key(left), element_key(right)
    if op == "<":
        return lk < rk
    if op == "<=":
        return lk <= rk
    if op == ">":
        return lk > rk
    if op == ">=":
        return lk >= rk
    raise ValueError(f"unknown comparison operator {op!r}")


# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str
    type: str | None = None

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Elem:
    """A named (non-integer) domain element used as a constant."""

    name: str


@dataclass(frozen=True)
class FuncApp:
    name: str
    args: tuple["Term", ...] = ()
    type: str | None = None  # result type, filled in by validation


@dataclass(frozen=True)
class Cardinality:
    vars: tuple[Var, ...]
    body: "Formula"


Term = Union[Var, Int, Elem, FuncApp, Cardinality]


def is_simple(t: Term) -> bool:
    """Variables and constants.  Element constants count as simple here."""
    return isinstance(t, (Var, Int, Elem))


# ------------------------------------------------------------------ formulas


@dataclass(frozen=True)
class Bool:
    value: bool


TRUE = Bool(True)
FALSE = Bool(False)


@dataclass(frozen=True)
class PredAtom:
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Bool, PredAtom, Comparison, Not, And, Or, Implies, Iff, Forall, Exists]
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)


def conjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


# --------------------------------------------------------------- theories


@dataclass(frozen=True)
class Rule:
    """``!x1..xn: head <- body``; head variables are implicitly quantified."""

    head: PredAtom
    body: Formula


@dataclass(frozen=True)
class Definition:
    rules: tuple[Rule, ...]

    def defined(self) -> tuple[str, ...]:
        out: list[str] = []
        for r in self.rules:
            if r.head.name not in out:
                out.append(r.head.name)
        return tuple(out)

    def open_symbols(self) -> tuple[str, ...]:
        defined = set(self.defined())
        out: list[str] = []
        for r in self.rules:
            for s in symbols_of(r.body):
                if s not in defined and s not in out:
                    out.append(s)
        return tuple(out)


@dataclass(frozen=True)
class Theory:
    sentences: tuple[Formula, ...] = ()
    definitions: tuple[Definition, ...] = ()


@dataclass
class Vocabulary:
    types: tuple[str, ...] = ()
    predicates: dict[str, tuple[str, ...]] = field(default_factory=dict)
    functions: dict[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)

    def kind(self, name: str) -> str | None:
        if name in self.types:
            return "type"
        if name in self.predicates:
            return "predicate"
        if name in self.functions:
            return "function"
        return None

    def symbols(self) -> list[str]:
        return [*self.types, *self.predicates, *self.functions]


@dataclass
class Structure:
    """A (possibly partial) interpretation of a vocabulary.

    ``types`` keeps declaration order; relation and function tables keep the
    order they were given in, which only matters for emitted fact order.
    Equality ignores that order.
    """

    types: dict[str, tuple[Element, ...]] = field(default_factory=dict)
    predicates: dict[str, tuple[tuple[Element, ...], ...]] = field(default_factory=dict)
    functions: dict[str, dict[tuple[Element, ...], Element]] = field(default_factory=dict)

    @property
    def domain(self) -> tuple[Element, ...]:
        seen: dict[Element, None] = {}
        for elems in self.types.values():
            for e in elems:
                seen.setdefault(e, None)
        return tuple(seen)

    def interpreted(self) -> set[str]:
        return set(self.types) | set(self.predicates) | set(self.functions)

    def type_of(self, element: Element) -> str | None:
        for t, elems in self.types.items():
            if element in elems:
                return t
        return None

    def canonical(self):
        return (
            tuple(sorted((t, frozenset(v)) for t, v in self.types.items())),
            tuple(sorted((p, frozenset(v)) for p, v in self.predicates.items())),
            tuple(sorted((f, frozenset(v.items())) for f, v in self.functions.items())),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def sort_key(self):
        def rel(v):
            return sorted(tuple(element_key(e) for e in t) for t in v)

        return (
            [(p, rel(self.predicates[p])) for p in sorted(self.predicates)],
            [
                (f, sorted((tuple(element_key(a) for a in k), element_key(v))
                           for k, v in self.functions[f].items()))
                for f in sorted(self.functions)
            ],
        )

    def copy(self) -> "Structure":
        return Structure(dict(self.types), dict(self.predicates),
                         {f: dict(m) for f, m in self.functions.items()})


@dataclass
class ModelExpansionProblem:
    vocabulary: Vocabulary
    structure: Structure
    theory: Theory


# ------------------------------------------------------------- traversals


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, FuncApp):
        for a in t.args:
            yield from subterms(a)


def formula_terms(f: Formula) -> Iterator[Term]:
    """Top-level terms of an atom (not descending into cardinality bodies)."""
    if isinstance(f, PredAtom):
        yield from f.args
    elif isinstance(f, Comparison):
        yield f.left
        yield f.right


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Not, Forall, Exists)):
        return (f.body,)
    return ()


def symbols_of(f: Formula) -> list[str]:
    """Predicate and function names used in ``f``, in first-occurrence order."""
    out: list[str] = []

    def term(t: Term) -> None:
        if isinstance(t, FuncApp):
            if t.name not in out:
                out.append(t.name)
            for a in t.args:
                term(a)
        elif isinstance(t, Cardinality):
            form(t.body)

    def form(g: Formula) -> None:
        if isinstance(g, PredAtom):
            if g.name not in out:
                out.append(g.name)
        for t in formula_terms(g):
            term(t)
        for c in children(g):
            form(c)

    form(f)
    return out


def free_variables(f: Formula | Term) -> tuple[Var, ...]:
    """Free variables in deterministic first-occurrence order."""
    out: dict[str, Var] = {}

    def term(t: Term, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound and t.name not in out:
                out[t.name] = t
        elif isinstance(t, FuncApp):
            for a in t.args:
                term(a, bound)
        elif isinstance(t, Cardinality):
            form(t.body, bound | {v.name for v in t.vars})

    def form(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, (PredAtom, Comparison)):
            for t in formula_terms(g):
                term(t, bound)
        elif isinstance(g, (Forall, Exists)):
            form(g.body, bound | {g.var.name})
        else:
            for c in children(g):
                form(c, bound)

    if isinstance(f, (Var, Int, Elem, FuncApp, Cardinality)):
        term(f, frozenset())
    else:
        form(f, frozenset())
    return tuple(out.values())


def variable_names(f: Formula) -> set[str]:
    """Every variable name occurring in ``f``, free or bound."""
    names: set[str] = set()

    def term(t: Term) -> None:
        if isinstance(t, Var):
            names.add(t.name)
        elif isinstance(t, FuncApp):
            for a in t.args:
                term(a)
        elif isinstance(t, Cardinality):
            names.update(v.name for v in t.vars)
            form(t.body)

    def form(g: Formula) -> None:
        if isinstance(g, (Forall, Exists)):
            names.add(g.var.name)
        for t in formula_terms(g):
            term(t)
        for c in children(g):
            form(c)

    form(f)
    return names


# --------------------------------------------------------- pretty printing

_OP_TEXT = {"=": "=", "!=": "~=", "<=": "=<", ">=": ">=", "<": "<", ">": ">"}


def format_element(e: Element) -> str:
    return str(e)


def format_var(v: Var) -> str:
    return f"{v.name}[{v.type}]" if v.type else v.name


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Elem):
        return t.name
    if isinstance(t, FuncApp):
        return f"{t.name}({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, Cardinality):
        vs = ", ".join(format_var(v) for v in t.vars)
        return f"#{{{vs} : {format_formula(t.body)}}}"
    raise TypeError(t)


def _operand(f: Formula) -> str:
    if isinstance(f, (Bool, PredAtom, Comparison, Not)):
        return format_formula(f)
    return f"({format_formula(f)})"


def format_formula(f: Formula) -> str:
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, PredAtom):
        if not f.args:
            return f.name
        return f"{f.name}({', '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Comparison):
        return f"{format_term(f.left)} {_OP_TEXT[f.op]} {format_term(f.right)}"
    if isinstance(f, Not):
        return f"~{_operand(f.body)}"
    if isinstance(f, BINARY):
        sym = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}[type(f)]
        return f"{_operand(f.left)} {sym} {_operand(f.right)}"
    if isinstance(f, (Forall, Exists)):
        q = "!" if isinstance(f, Forall) else "?"
        return f"{q}{format_var(f.var)} : {format_formula(f.body)}"
    raise TypeError(f)


def _format_tuple(t: tuple[Element, ...]) -> str:
    return ",".join(format_element(e) for e in t) if t else "()"


def format_interpretation(s: Structure, vocabulary: Vocabulary | None = None,
                          sort: bool = False) -> list[str]:
    lines = []
    for t, elems in s.types.items():
        es = sorted(elems, key=element_key) if sort else elems
        lines.append(f"{t} = {{{', '.join(format_element(e) for e in es)}}}")
    for p, tuples in s.predicates.items():
        arity = len(vocabulary.predicates[p]) if vocabulary and p in vocabulary.predicates else None
        if arity == 0 or (arity is None and tuples and len(tuples[0]) == 0):
            lines.append(f"{p} = {'true' if tuples else 'false'}")
            continue
        ts = sorted(tuples, key=lambda t: tuple(element_key(e) for e in t)) if sort else tuples
        lines.append(f"{p} = {{{'; '.join(_format_tuple(t) for t in ts)}}}")
    for fn, table in s.functions.items():
        items = list(table.items())
        if sort:
            items.sort(key=lambda kv: tuple(element_key(e) for e in kv[0]))
        body = "; ".join(
            (f"{_format_tuple(k)} -> " if k else "-> ") + format_element(v) for k, v in items
        )
        lines.append(f"{fn} = {{{body}}}")
    return lines


def format_structure(s: Structure, vocabulary: Vocabulary | None = None,
                     sort: bool = True) -> str:
    inner = "".join(f"  {line}\n" for line in format_interpretation(s, vocabulary, sort))
    return "structure {\n" + inner + "}\n"


def format_problem(m: ModelExpansionProblem) -> str:
    v = m.vocabulary
    out = ["vocabulary {"]
    for t in v.types:
        out.append(f"  type {t}")
    for p, typing in v.predicates.items():
        out.append(f"  {p}({', '.join(typing)})")
    for fn, (args, res) in v.functions.items():
        out.append(f"  {fn}({', '.join(args)}) : {res}")
    out.append("}")
    out.append(format_structure(m.structure, v, sort=False).rstrip("\n"))
    out.append("theory {")
    for s in m.theory.sentences:
        out.append(f"  {format_formula(s)}.")
    for d in m.theory.definitions:
        out.append("  define {")
        for r in d.rules:
            out.append(f"    {format_formula(r.head)} <- {format_formula(r.body)}.")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"
