"""Well-formedness checks and variable type inference."""

from __future__ import annotations

import itertools

from .errors import ValidationError
from .syntax import (
    ORDERING_OPS, Bool, Cardinality, Comparison, Definition, Elem, Exists, Forall,
    Formula, FuncApp, Int, ModelExpansionProblem, Not, PredAtom, Rule, Structure,
    Term, Theory, Var, Vocabulary, BINARY,
)

INT_SORT = "#int"


def is_integer_type(structure: Structure, t: str) -> bool:
    return all(isinstance(e, int) for e in structure.types.get(t, ()))


def check_vocabulary(v: Vocabulary) -> None:
    names = v.symbols()
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ValidationError(f"symbol declared more than once: {sorted(dupes)}")
    for p, typing in v.predicates.items():
        for t in typing:
            if t not in v.types:
                raise ValidationError(f"predicate {p} uses undeclared type {t}")
    for f, (args, res) in v.functions.items():
        for t in (*args, res):
            if t not in v.types:
                raise ValidationError(f"function {f} uses undeclared type {t}")


def check_structure(v: Vocabulary, s: Structure) -> None:
    for name in s.interpreted():
        kind = v.kind(name)
        expected = ("type" if name in s.types else
                    "predicate" if name in s.predicates else "function")
        if kind != expected:
            raise ValidationError(f"structure interprets {name} as a {expected}, "
                                  f"but it is declared as {kind or 'nothing'}")
    for t in v.types:
        if t not in s.types:
            raise ValidationError(f"type {t} is not interpreted by the structure")
    owner: dict = {}
    for t, elems in s.types.items():
        for e in elems:
            if e in owner and owner[e] != t:
                raise ValidationError(
                    f"types must partition the domain: {e} is in both {owner[e]} and {t}")
            owner[e] = t
    for p, rel in s.predicates.items():
        typing = v.predicates[p]
        for tup in rel:
            if len(tup) != len(typing):
                raise ValidationError(f"tuple {tup} has wrong arity for {p}/{len(typing)}")
            for e, t in zip(tup, typing):
                if e not in s.types[t]:
                    raise ValidationError(f"tuple {tup} of {p} does not respect its typing: "
                                          f"{e} is not a {t}")
    for f, table in s.functions.items():
        args, res = v.functions[f]
        for key in itertools.product(*(s.types[t] for t in args)):
            if key not in table:
                raise ValidationError(f"function {f} is not total: no value for {key}")
        for key, val in table.items():
            if len(key) != len(args) or any(e not in s.types[t] for e, t in zip(key, args)):
                raise ValidationError(f"function {f} has an ill-typed argument tuple {key}")
            if val not in s.types[res]:
                raise ValidationError(f"function {f} maps {key} to {val}, which is not a {res}")


class _Inference:
    """Union-find over variable binders, each root carrying at most one type."""

    def __init__(self):
        self.parent: list[int] = []
        self.types: list[str | None] = []
        self.names: list[str] = []

    def binder(self, name: str, type_: str | None) -> int:
        self.parent.append(len(self.parent))
        self.types.append(type_)
        self.names.append(name)
        return len(self.parent) - 1

    def find(self, b: int) -> int:
        while self.parent[b] != b:
            self.parent[b] = self.parent[self.parent[b]]
            b = self.parent[b]
        return b

    def assign(self, b: int, t: str) -> None:
        r = self.find(b)
        if self.types[r] is None:
            self.types[r] = t
        elif self.types[r] != t:
            raise ValidationError(
                f"contradictory types for variable {self.names[b]}: {self.types[r]} and {t}")

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        ta, tb = self.types[ra], self.types[rb]
        if ta and tb and ta != tb:
            raise ValidationError(
                f"contradictory types for variables {self.names[a]} and {self.names[b]}: "
                f"{ta} and {tb}")
        self.parent[rb] = ra
        self.types[ra] = ta or tb

    def type_of(self, b: int) -> str:
        t = self.types[self.find(b)]
        if t is None:
            raise ValidationError(f"cannot infer the type of variable {self.names[b]}; "
                                  f"add an annotation {self.names[b]}[Type]")
        return t


class _Checker:
    def __init__(self, m: ModelExpansionProblem):
        self.v = m.vocabulary
        self.s = m.structure
        self.inf = _Inference()
        self.elem_type = {e: t for t, es in self.s.types.items() for e in es}

    # pass 1: attach binder ids and collect type constraints
    def collect_term(self, t: Term, scope: dict[str, int], expected: str | None) -> tuple:
        if isinstance(t, Var):
            if t.name not in scope:
                raise ValidationError(f"free variable {t.name}")
            b = scope[t.name]
            if expected is not None:
                self.inf.assign(b, expected)
            return ("var", b)
        if isinstance(t, Int):
            return ("int", t.value)
        if isinstance(t, Elem):
            if t.name not in self.elem_type:
                raise ValidationError(f"element {t.name} does not belong to any type")
            return ("elem", t.name)
        if isinstance(t, FuncApp):
            if t.name not in self.v.functions:
                raise ValidationError(f"undeclared function {t.name}")
            args, res = self.v.functions[t.name]
            if len(args) != len(t.args):
                raise ValidationError(f"function {t.name} expects {len(args)} arguments")
            return ("func", t.name,
                    tuple(self.collect_term(a, scope, at) for a, at in zip(t.args, args)))
        if isinstance(t, Cardinality):
            inner = dict(scope)
            ids = []
            for v in t.vars:
                ids.append(self.inf.binder(v.name, v.type))
                inner[v.name] = ids[-1]
            return ("card", tuple(ids), self.collect(t.body, inner))
        raise TypeError(t)

    def _sort_hint(self, ann) -> str | None:
        if ann[0] == "elem":
            return self.elem_type[ann[1]]
        if ann[0] == "func":
            return self.v.functions[ann[1]][1]
        return None

    def collect(self, f: Formula, scope: dict[str, int]) -> tuple:
        if isinstance(f, Bool):
            return ("bool",)
        if isinstance(f, PredAtom):
            if f.name not in self.v.predicates:
                raise ValidationError(f"undeclared predicate {f.name}")
            typing = self.v.predicates[f.name]
            if len(typing) != len(f.args):
                raise ValidationError(f"predicate {f.name} expects {len(typing)} arguments")
            return ("pred", tuple(self.collect_term(a, scope, t) for a, t in zip(f.args, typing)))
        if isinstance(f, Comparison):
            left = self.collect_term(f.left, scope, None)
            right = self.collect_term(f.right, scope, None)
            for a, b in ((left, right), (right, left)):
                if a[0] == "var":
                    if b[0] == "var":
                        self.inf.union(a[1], b[1])
                    elif (hint := self._sort_hint(b)) is not None:
                        self.inf.assign(a[1], hint)
            return ("cmp", left, right)
        if isinstance(f, (Forall, Exists)):
            b = self.inf.binder(f.var.name, f.var.type)
            inner = dict(scope)
            inner[f.var.name] = b
            return ("quant", b, self.collect(f.body, inner))
        if isinstance(f, Not):
            return ("not", self.collect(f.body, scope))
        if isinstance(f, BINARY):
            return ("bin", self.collect(f.left, scope), self.collect(f.right, scope))
        raise TypeError(f)

    # pass 2: rebuild with types and check typing
    def sort(self, t: Term) -> str:
        if isinstance(t, Var):
            return t.type
        if isinstance(t, (Int, Cardinality)):
            return INT_SORT
        if isinstance(t, Elem):
            return self.elem_type[t.name]
        if isinstance(t, FuncApp):
            return t.type
        raise TypeError(t)

    def _compatible(self, sort: str, expected: str) -> bool:
        if sort == expected:
            return True
        return sort == INT_SORT and is_integer_type(self.s, expected)

    def _integral(self, sort: str) -> bool:
        return sort == INT_SORT or is_integer_type(self.s, sort)

    def build_term(self, t: Term, ann: tuple) -> Term:
        if isinstance(t, Var):
            return Var(t.name, self.inf.type_of(ann[1]))
        if isinstance(t, (Int, Elem)):
            return t
        if isinstance(t, FuncApp):
            arg_types, res = self.v.functions[t.name]
            args = tuple(self.build_term(a, an) for a, an in zip(t.args, ann[2]))
            for a, at in zip(args, arg_types):
                if not self._compatible(self.sort(a), at):
                    raise ValidationError(
                        f"argument {a} of {t.name} has type {self.sort(a)}, expected {at}")
            return FuncApp(t.name, args, res)
        if isinstance(t, Cardinality):
            vs = tuple(Var(v.name, self.inf.type_of(b)) for v, b in zip(t.vars, ann[1]))
            return Cardinality(vs, self.build(t.body, ann[2]))
        raise TypeError(t)

    def build(self, f: Formula, ann: tuple) -> Formula:
        if isinstance(f, Bool):
            return f
        if isinstance(f, PredAtom):
            typing = self.v.predicates[f.name]
            args = tuple(self.build_term(a, an) for a, an in zip(f.args, ann[1]))
            for a, t in zip(args, typing):
                if not self._compatible(self.sort(a), t):
                    raise ValidationError(
                        f"argument of {f.name} has type {self.sort(a)}, expected {t}")
            return PredAtom(f.name, args)
        if isinstance(f, Comparison):
            left = self.build_term(f.left, ann[1])
            right = self.build_term(f.right, ann[2])
            ls, rs = self.sort(left), self.sort(right)
            if f.op in ORDERING_OPS:
                if not (self._integral(ls) and self._integral(rs)):
                    raise ValidationError(
                        f"ordering comparison {f.op} needs integer operands, got {ls} and {rs}")
            elif ls != rs and INT_SORT not in (ls, rs):
                raise ValidationError(f"comparison between different types {ls} and {rs}")
            return Comparison(left, f.op, right)
        if isinstance(f, (Forall, Exists)):
            var = Var(f.var.name, self.inf.type_of(ann[1]))
            return type(f)(var, self.build(f.body, ann[2]))
        if isinstance(f, Not):
            return Not(self.build(f.body, ann[1]))
        if isinstance(f, BINARY):
            return type(f)(self.build(f.left, ann[1]), self.build(f.right, ann[2]))
        raise TypeError(f)

    def sentence(self, f: Formula) -> Formula:
        return self.build(f, self.collect(f, {}))

    def rule(self, r: Rule) -> Rule:
        if r.head.name not in self.v.predicates:
            raise ValidationError(f"rule head {r.head.name} is not a declared predicate")
        typing = self.v.predicates[r.head.name]
        if len(typing) != len(r.head.args):
            raise ValidationError(f"predicate {r.head.name} expects {len(typing)} arguments")
        scope: dict[str, int] = {}
        head_ann = []
        for a, t in zip(r.head.args, typing):
            if isinstance(a, Var):
                if a.name not in scope:
                    scope[a.name] = self.inf.binder(a.name, a.type)
                self.inf.assign(scope[a.name], t)
                head_ann.append(("var", scope[a.name]))
            elif isinstance(a, (Int, Elem)):
                head_ann.append(self.collect_term(a, scope, t))
            else:
                raise ValidationError(
                    f"rule head {r.head.name} must have variables or constants as arguments")
        body_ann = self.collect(r.body, scope)
        head = self.build(r.head, ("pred", tuple(head_ann)))
        return Rule(head, self.build(r.body, body_ann))


def validate_problem(m: ModelExpansionProblem) -> ModelExpansionProblem:
    """Check well-formedness and return a copy with every variable typed."""
    check_vocabulary(m.vocabulary)
    check_structure(m.vocabulary, m.structure)
    c = _Checker(m)
    sentences = []
    for f in m.theory.sentences:
        try:
            sentences.append(c.sentence(f))
        except ValidationError as e:
            if str(e).startswith("free variable"):
                raise ValidationError(f"sentence has a {e}") from None
            raise
    definitions = []
    for d in m.theory.definitions:
        rules = []
        for r in d.rules:
            try:
                rules.append(c.rule(r))
            except ValidationError as e:
                if str(e).startswith("free variable"):
                    raise ValidationError(
                        f"rule for {r.head.name}: body has a {e} not occurring in the head"
                    ) from None
                raise
        definitions.append(Definition(tuple(rules)))
    return ModelExpansionProblem(m.vocabulary, m.structure,
                                 Theory(tuple(sentences), tuple(definitions)))
