"""Recursive-descent parser for the ASCII problem format.

::

    vocabulary { type Country  type Color  Border(Country, Country)
                 ColorOf(Country) : Color }
    structure  { Country = {be, nl, lux}  Color = {red, blue}
                 Border = {nl,be; be,lux} }
    theory     { !c1, c2 : Border(c1, c2) => ColorOf(c1) ~= ColorOf(c2).
                 define { SymBorder(c1, c2) <- Border(c1, c2). } }

Names are resolved while parsing: inside formulas a bare name is a bound
variable if one is in scope, otherwise a 0-ary function, otherwise a domain
element.  In a rule head, names that are not domain elements are the rule's
(implicitly quantified) variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    FALSE, TRUE, And, Cardinality, Comparison, Definition, Elem, Element, Exists,
    Forall, FuncApp, Iff, Implies, Int, ModelExpansionProblem, Not, Or, PredAtom,
    Rule, Structure, Term, Theory, Var, Vocabulary,
)

KEYWORDS = {"vocabulary", "structure", "theory", "type", "define", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<int>-?\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op><=>|=>|<-|->|~=|=<|>=|[=<>!?~&|#{}()\[\],;:.])
    """,
    re.VERBOSE,
)

_CMP = {"=": "=", "~=": "!=", "=<": "<=", ">=": ">=", "<": "<", ">": ">"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _element(tok: Token) -> Element:
    return int(tok.text) if tok.kind == "int" else tok.text


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        self.voc = Vocabulary()
        self.elements: set[Element] = set()

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self, what: str = "name") -> Token:
        t = self.tok
        if t.kind != "name":
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        if t.text in KEYWORDS:
            raise self.error(f"keyword {t.text!r} cannot be used as a {what}")
        self.i += 1
        return t

    # -- problem
    def problem(self) -> ModelExpansionProblem:
        self.vocabulary()
        structure = self.structure()
        self.elements = set(structure.domain)
        for rel in structure.predicates.values():
            for t in rel:
                self.elements.update(t)
        for table in structure.functions.values():
            for k, v in table.items():
                self.elements.update(k)
                self.elements.add(v)
        theory = self.theory()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after theory block")
        return ModelExpansionProblem(self.voc, structure, theory)

    def vocabulary(self) -> None:
        self.expect("vocabulary")
        self.expect("{")
        types: list[str] = []
        preds: dict[str, tuple[str, ...]] = {}
        funcs: dict[str, tuple[tuple[str, ...], str]] = {}
        seen: set[str] = set()
        while not self.accept("}"):
            if self.accept("type"):
                t = self.name("type name")
                self._fresh_symbol(t, seen)
                types.append(t.text)
                continue
            n = self.name("symbol name")
            self._fresh_symbol(n, seen)
            args: list[str] = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self._declared_type(types))
                    while self.accept(","):
                        args.append(self._declared_type(types))
                self.expect(")")
            if self.accept(":"):
                funcs[n.text] = (tuple(args), self._declared_type(types))
            else:
                preds[n.text] = tuple(args)
            self.accept(";")
        self.voc = Vocabulary(tuple(types), preds, funcs)

    def _fresh_symbol(self, tok: Token, seen: set[str]) -> None:
        if tok.text in seen:
            raise self.error(f"duplicate declaration of {tok.text!r}", tok)
        seen.add(tok.text)

    def _declared_type(self, types: list[str]) -> str:
        t = self.name("type name")
        if t.text not in types:
            raise self.error(f"undeclared type {t.text!r}", t)
        return t.text

    def structure(self) -> Structure:
        self.expect("structure")
        self.expect("{")
        s = Structure()
        done: set[str] = set()
        while not self.accept("}"):
            n = self.name("symbol name")
            kind = self.voc.kind(n.text)
            if kind is None:
                raise self.error(f"undeclared symbol {n.text!r}", n)
            if n.text in done:
                raise self.error(f"duplicate interpretation of {n.text!r}", n)
            done.add(n.text)
            self.expect("=")
            if kind == "type":
                s.types[n.text] = self._elements()
            elif kind == "predicate":
                s.predicates[n.text] = self._tuples()
            else:
                s.functions[n.text] = self._table()
            self.accept(";")
        # keep vocabulary order for types
        s.types = {t: s.types[t] for t in self.voc.types if t in s.types}
        return s

    def _element_tok(self) -> Element:
        t = self.tok
        if t.kind == "int" or (t.kind == "name" and t.text not in KEYWORDS):
            self.i += 1
            return _element(t)
        raise self.error(f"expected domain element, found {t.text or 'end of input'!r}")

    def _elements(self) -> tuple[Element, ...]:
        self.expect("{")
        out: list[Element] = []
        while not self.accept("}"):
            e = self._element_tok()
            if e not in out:
                out.append(e)
            if not (self.accept(",") or self.accept(";")) and not self.at("}"):
                raise self.error("expected ',' or '}'")
        return tuple(out)

    def _tuple(self) -> tuple[Element, ...]:
        if self.accept("("):
            items: list[Element] = []
            if not self.at(")"):
                items.append(self._element_tok())
                while self.accept(","):
                    items.append(self._element_tok())
            self.expect(")")
            return tuple(items)
        items = [self._element_tok()]
        while self.accept(","):
            items.append(self._element_tok())
        return tuple(items)

    def _tuples(self) -> tuple[tuple[Element, ...], ...]:
        if self.accept("true"):
            return ((),)
        if self.accept("false"):
            return ()
        self.expect("{")
        out: list[tuple[Element, ...]] = []
        while not self.accept("}"):
            t = self._tuple()
            if t not in out:
                out.append(t)
            if not self.accept(";") and not self.at("}"):
                raise self.error("expected ';' or '}'")
        return tuple(out)

    def _table(self) -> dict[tuple[Element, ...], Element]:
        self.expect("{")
        out: dict[tuple[Element, ...], Element] = {}
        while not self.accept("}"):
            start = self.tok
            key = () if self.at("->") else self._tuple()
            self.expect("->")
            val = self._element_tok()
            if key in out and out[key] != val:
                raise self.error("function maps the same arguments twice", start)
            out[key] = val
            if not self.accept(";") and not self.at("}"):
                raise self.error("expected ';' or '}'")
        return out

    # -- theory
    def theory(self) -> Theory:
        self.expect("theory")
        self.expect("{")
        sentences = []
        definitions = []
        while not self.accept("}"):
            if self.accept("define"):
                definitions.append(self.definition())
            else:
                sentences.append(self.formula({}))
                self.expect(".")
        return Theory(tuple(sentences), tuple(definitions))

    def definition(self) -> Definition:
        self.expect("{")
        rules = []
        while not self.accept("}"):
            head, scope = self.head()
            self.expect("<-")
            body = self.formula(scope)
            self.expect(".")
            rules.append(Rule(head, body))
        return Definition(tuple(rules))

    def head(self) -> tuple[PredAtom, dict[str, Var]]:
        n = self.name("predicate name")
        if self.voc.kind(n.text) != "predicate":
            raise self.error(f"{n.text!r} is not a declared predicate", n)
        scope: dict[str, Var] = {}
        args: list[Term] = []
        if self.accept("("):
            if not self.at(")"):
                args.append(self._head_arg(scope))
                while self.accept(","):
                    args.append(self._head_arg(scope))
            self.expect(")")
        return PredAtom(n.text, tuple(args)), scope

    def _head_arg(self, scope: dict[str, Var]) -> Term:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Int(int(t.text))
        n = self.name("variable")
        if n.text in self.elements:
            return Elem(n.text)
        if self.voc.kind(n.text) is not None:
            raise self.error(f"symbol {n.text!r} cannot be a rule head argument", n)
        scope.setdefault(n.text, Var(n.text))
        return scope[n.text]

    def formula(self, scope: dict[str, Var]):
        return self._iff(scope)

    def _iff(self, scope):
        left = self._implies(scope)
        while self.accept("<=>"):
            left = Iff(left, self._implies(scope))
        return left

    def _implies(self, scope):
        left = self._or(scope)
        if self.accept("=>"):
            return Implies(left, self._implies(scope))
        return left

    def _or(self, scope):
        left = self._and(scope)
        while self.accept("|"):
            left = Or(left, self._and(scope))
        return left

    def _and(self, scope):
        left = self._unary(scope)
        while self.accept("&"):
            left = And(left, self._unary(scope))
        return left

    def _unary(self, scope):
        if self.accept("~"):
            return Not(self._unary(scope))
        if self.at("!") or self.at("?"):
            quant = Forall if self.tok.text == "!" else Exists
            self.i += 1
            vs = self._vdecls()
            self.expect(":")
            inner = dict(scope)
            inner.update({v.name: v for v in vs})
            body = self.formula(inner)
            for v in reversed(vs):
                body = quant(v, body)
            return body
        return self._primary(scope)

    def _vdecls(self) -> list[Var]:
        out = [self._vdecl()]
        while self.accept(","):
            out.append(self._vdecl())
        return out

    def _vdecl(self) -> Var:
        n = self.name("variable")
        if self.accept("["):
            t = self.name("type name")
            if t.text not in self.voc.types:
                raise self.error(f"undeclared type {t.text!r}", t)
            self.expect("]")
            return Var(n.text, t.text)
        return Var(n.text)

    def _primary(self, scope):
        if self.accept("("):
            f = self.formula(scope)
            self.expect(")")
            return f
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        t = self.tok
        if t.kind == "name" and t.text not in scope and self.voc.kind(t.text) == "predicate":
            self.i += 1
            args: tuple[Term, ...] = ()
            if self.accept("("):
                args = self._terms(scope)
                self.expect(")")
            return PredAtom(t.text, args)
        if t.kind == "name" and self.peek().text == "(" and self.voc.kind(t.text) is None:
            raise self.error(f"undeclared symbol {t.text!r}", t)
        left = self.term(scope)
        op = self.tok
        if op.text not in _CMP or op.kind != "op":
            raise self.error(f"expected comparison operator, found {op.text or 'end of input'!r}")
        self.i += 1
        right = self.term(scope)
        return Comparison(left, _CMP[op.text], right)

    def _terms(self, scope) -> tuple[Term, ...]:
        if self.at(")"):
            return ()
        out = [self.term(scope)]
        while self.accept(","):
            out.append(self.term(scope))
        return tuple(out)

    def term(self, scope) -> Term:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Int(int(t.text))
        if self.accept("#"):
            self.expect("{")
            vs = self._vdecls()
            self.expect(":")
            inner = dict(scope)
            inner.update({v.name: v for v in vs})
            body = self.formula(inner)
            self.expect("}")
            return Cardinality(tuple(vs), body)
        n = self.name("term")
        if n.text in scope and not self.at("("):
            return scope[n.text]
        kind = self.voc.kind(n.text)
        if kind == "function":
            args: tuple[Term, ...] = ()
            if self.accept("("):
                args = self._terms(scope)
                self.expect(")")
            return FuncApp(n.text, args, self.voc.functions[n.text][1])
        if kind is not None:
            raise self.error(f"{kind} {n.text!r} used as a term", n)
        if self.at("("):
            raise self.error(f"undeclared symbol {n.text!r}", n)
        if n.text in self.elements:
            return Elem(n.text)
        raise self.error(f"undeclared symbol {n.text!r}", n)


def parse_problem(source: str) -> ModelExpansionProblem:
    """Parse a complete problem file into an (unvalidated) AST."""
    return _Parser(source).problem()


def parse_structure(source: str, vocabulary: Vocabulary) -> Structure:
    """Parse a lone ``structure { ... }`` block against a known vocabulary."""
    p = _Parser(source)
    p.voc = vocabulary
    s = p.structure()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after structure block")
    return s


def parse_structures(source: str, vocabulary: Vocabulary) -> list[Structure]:
    """Parse a sequence of structure blocks, as printed by ``solve``."""
    p = _Parser(source)
    p.voc = vocabulary
    out = []
    while p.tok.kind != "eof":
        out.append(p.structure())
    return out
