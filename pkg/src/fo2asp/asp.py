"""ASP-Core-2 abstract syntax, text emitter, reader and safety checker.

Only the fragment produced by the translation is covered: normal rules,
choice rules with a single head atom, integrity constraints, default
negation, ``#count`` aggregates and built-in comparisons.

Terms are ``Variable`` objects or plain constants (``str`` identifiers and
``int`` numbers), so a variable-free :class:`Atom` doubles as a ground atom.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import ParseError

OPS = ("=", "!=", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Constant = Union[str, int]
AspTerm = Union[Variable, Constant]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[AspTerm, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(map(format_term, self.args))})"

    def is_ground(self) -> bool:
        return not any(isinstance(a, Variable) for a in self.args)


GroundAtom = Atom


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True)
class BuiltinComparison:
    left: AspTerm
    op: str
    right: AspTerm

    def __str__(self) -> str:
        return f"{format_term(self.left)} {self.op} {format_term(self.right)}"


Condition = Union[Literal, BuiltinComparison]


@dataclass(frozen=True)
class AggregateElement:
    terms: tuple[AspTerm, ...]
    condition: tuple[Condition, ...]

    def __str__(self) -> str:
        head = ",".join(map(format_term, self.terms))
        if not self.condition:
            return head
        return f"{head} : {', '.join(map(str, self.condition))}"


@dataclass(frozen=True)
class CountAggregate:
    elements: tuple[AggregateElement, ...]
    op: str
    bound: AspTerm

    def __str__(self) -> str:
        return f"#count{{{'; '.join(map(str, self.elements))}}} {self.op} {format_term(self.bound)}"


BodyElement = Union[Literal, CountAggregate, BuiltinComparison]


@dataclass(frozen=True)
class AspRule:
    """``head`` is None for constraints; ``choice`` marks ``{head} :- body``."""

    head: Atom | None
    body: tuple[BodyElement, ...] = ()
    choice: bool = False

    def __post_init__(self):
        if self.choice and self.head is None:
            raise ValueError("a choice rule needs a head atom")

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    def __str__(self) -> str:
        if self.head is None:
            head = ""
        elif self.choice:
            head = f"{{{self.head}}}"
        else:
            head = str(self.head)
        if not self.body:
            return f"{head}."
        body = ", ".join(map(str, self.body))
        return f"{head} :- {body}." if head else f":- {body}."


@dataclass
class AspProgram:
    statements: list[AspRule]

    def __iter__(self) -> Iterator[AspRule]:
        return iter(self.statements)

    def __len__(self) -> int:
        return len(self.statements)

    def __str__(self) -> str:
        return emit(self)


def format_term(t: AspTerm) -> str:
    return str(t)


def emit(p: AspProgram | Iterable[AspRule]) -> str:
    """One statement per line, deterministic byte-for-byte."""
    return "".join(f"{r}\n" for r in p)


# ------------------------------------------------------------------ variables


def term_vars(t: AspTerm) -> set[str]:
    return {t.name} if isinstance(t, Variable) else set()


def atom_vars(a: Atom) -> set[str]:
    out: set[str] = set()
    for t in a.args:
        out |= term_vars(t)
    return out


def condition_vars(c: Condition) -> set[str]:
    if isinstance(c, Literal):
        return atom_vars(c.atom)
    return term_vars(c.left) | term_vars(c.right)


def rule_vars(r: AspRule) -> set[str]:
    out = atom_vars(r.head) if r.head else set()
    for b in r.body:
        if isinstance(b, CountAggregate):
            out |= term_vars(b.bound)
            for e in b.elements:
                for t in e.terms:
                    out |= term_vars(t)
                for c in e.condition:
                    out |= condition_vars(c)
        else:
            out |= condition_vars(b)
    return out


def global_vars(r: AspRule) -> set[str]:
    """Variables occurring outside aggregate elements."""
    out = atom_vars(r.head) if r.head else set()
    for b in r.body:
        if isinstance(b, CountAggregate):
            out |= term_vars(b.bound)
        else:
            out |= condition_vars(b)
    return out


def positive_vars(conds: Iterable) -> set[str]:
    out: set[str] = set()
    for c in conds:
        if isinstance(c, Literal) and c.positive:
            out |= atom_vars(c.atom)
    return out


def check_safety(p: AspProgram | Iterable[AspRule]) -> list[AspRule]:
    """Rules in which some variable is not bound by a positive body literal.

    Global variables must occur in a positive literal of the rule body
    (outside aggregates).  Local aggregate variables must occur in a positive
    literal of their own element condition.
    """
    bad = []
    for r in p:
        bound = positive_vars(b for b in r.body if isinstance(b, Literal))
        ok = global_vars(r) <= bound
        for b in r.body:
            if not ok:
                break
            if isinstance(b, CountAggregate):
                for e in b.elements:
                    local: set[str] = set()
                    for t in e.terms:
                        local |= term_vars(t)
                    for c in e.condition:
                        local |= condition_vars(c)
                    if not local <= bound | positive_vars(e.condition):
                        ok = False
        if not ok:
            bad.append(r)
    return bad


# --------------------------------------------------------------------- reader

_TOK = re.compile(
    r"""(?P<ws>\s+|%[^\n]*)
      | (?P<int>-?\d+)
      | (?P<var>[A-Z_][A-Za-z0-9_']*)
      | (?P<id>[a-z][A-Za-z0-9_']*)
      | (?P<op>:-|\#count|!=|<=|>=|[=<>{}(),.:;])""",
    re.VERBOSE,
)


class _Reader:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOK.match(text, pos)
            if not m:
                line = text.count("\n", 0, pos) + 1
                raise ParseError(f"unexpected character {text[pos]!r}", line, 0)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), text.count("\n", 0, pos) + 1))
            pos = m.end()
        self.toks.append(("eof", "", text.count("\n") + 1))
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self, text: str | None = None) -> tuple[str, str, int]:
        t = self.toks[self.i]
        if text is not None and t[1] != text:
            raise ParseError(f"expected {text!r}, found {t[1] or 'end of input'!r}", t[2], 0)
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.toks[self.i][1] == text

    def program(self) -> AspProgram:
        out = []
        while self.peek()[0] != "eof":
            out.append(self.statement())
        return AspProgram(out)

    def statement(self) -> AspRule:
        head = None
        choice = False
        if self.at("{"):
            self.take("{")
            head = self.atom()
            self.take("}")
            choice = True
        elif not self.at(":-"):
            head = self.atom()
        body: list[BodyElement] = []
        if self.at(":-"):
            self.take(":-")
            body.append(self.body_element())
            while self.at(","):
                self.take(",")
                body.append(self.body_element())
        self.take(".")
        return AspRule(head, tuple(body), choice)

    def term(self) -> AspTerm:
        kind, text, line = self.take()
        if kind == "int":
            return int(text)
        if kind == "var":
            return Variable(text)
        if kind == "id":
            return text
        raise ParseError(f"expected a term, found {text or 'end of input'!r}", line, 0)

    def atom(self) -> Atom:
        kind, text, line = self.take()
        if kind != "id":
            raise ParseError(f"expected an atom, found {text or 'end of input'!r}", line, 0)
        args: list[AspTerm] = []
        if self.at("("):
            self.take("(")
            args.append(self.term())
            while self.at(","):
                self.take(",")
                args.append(self.term())
            self.take(")")
        return Atom(text, tuple(args))

    def condition(self) -> Condition:
        if self.at("not"):
            self.take("not")
            return Literal(self.atom(), False)
        kind = self.peek()[0]
        if kind in ("int", "var"):
            left = self.term()
            op = self.take()[1]
            if op not in OPS:
                raise ParseError(f"expected comparison operator, found {op!r}", self.peek()[2], 0)
            return BuiltinComparison(left, op, self.term())
        save = self.i
        a = self.atom()
        if self.peek()[1] in OPS:
            self.i = save
            left = self.term()
            op = self.take()[1]
            return BuiltinComparison(left, op, self.term())
        return Literal(a, True)

    def body_element(self) -> BodyElement:
        if self.at("#count"):
            self.take("#count")
            self.take("{")
            elements: list[AggregateElement] = []
            while not self.at("}"):
                terms = [self.term()]
                while self.at(","):
                    self.take(",")
                    terms.append(self.term())
                cond: list[Condition] = []
                if self.at(":"):
                    self.take(":")
                    cond.append(self.condition())
                    while self.at(","):
                        self.take(",")
                        cond.append(self.condition())
                elements.append(AggregateElement(tuple(terms), tuple(cond)))
                if self.at(";"):
                    self.take(";")
            self.take("}")
            op = self.take()[1]
            if op not in OPS:
                raise ParseError(f"expected aggregate operator, found {op!r}", self.peek()[2], 0)
            return CountAggregate(tuple(elements), op, self.term())
        return self.condition()


def parse_program(text: str) -> AspProgram:
    """Read the ASP fragment written by :func:`emit`."""
    return _Reader(text).program()
