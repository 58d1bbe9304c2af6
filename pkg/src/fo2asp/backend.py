"""Running an external ASP solver and mapping answer sets back to structures."""

from __future__ import annotations

import re
import shlex
import subprocess
from dataclasses import dataclass, field

from .asp import AspProgram, Atom, emit
from .errors import AnswerSetParseError, BackMappingError, SolverError
from .syntax import ModelExpansionProblem, Structure, element_key
from .translate import TranslationOutput

DEFAULT_TIMEOUT = 60.0


@dataclass
class SolverResult:
    status: str  # "SAT", "UNSAT" or "ERROR"
    answer_sets: list[frozenset[Atom]] = field(default_factory=list)
    raw_output: str = ""
    error: str = ""


_ATOM = re.compile(r"([a-z][A-Za-z0-9_']*)(?:\(([^()]*)\))?$")
_INT = re.compile(r"-?\d+$")
_IDENT = re.compile(r"[a-z][A-Za-z0-9_']*$")


def parse_atom(text: str) -> Atom:
    m = _ATOM.match(text)
    if not m:
        raise AnswerSetParseError(f"malformed atom {text!r}")
    args = []
    if m.group(2) is not None:
        for part in m.group(2).split(","):
            part = part.strip()
            if _INT.match(part):
                args.append(int(part))
            elif _IDENT.match(part):
                args.append(part)
            else:
                raise AnswerSetParseError(f"malformed argument {part!r} in {text!r}")
    return Atom(m.group(1), tuple(args))


def _split_atoms(line: str) -> list[str]:
    # atoms are separated by spaces outside parentheses
    out, depth, cur = [], 0, []
    for ch in line:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise AnswerSetParseError(f"unbalanced parentheses in {line!r}")
    if cur:
        out.append("".join(cur))
    return out


def parse_answer_sets(raw: str) -> tuple[str, list[frozenset[Atom]]]:
    """Status marker and answer sets from solver output.

    Each ``Answer: k`` line is followed by one line of atoms.  The output
    must end with ``SATISFIABLE``, ``UNSATISFIABLE`` or ``UNKNOWN``
    (optimization markers are not supported).
    """
    lines = raw.splitlines()
    sets: list[frozenset[Atom]] = []
    status = None
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("Answer:"):
            if i + 1 >= len(lines):
                raise AnswerSetParseError("answer header without atoms")
            atoms_line = lines[i + 1].strip()
            if atoms_line in ("SATISFIABLE", "UNSATISFIABLE") or atoms_line.startswith("Answer:"):
                atoms_line = ""
            else:
                i += 1
            sets.append(frozenset(parse_atom(a) for a in _split_atoms(atoms_line)))
        elif line in ("SATISFIABLE", "UNSATISFIABLE", "UNKNOWN"):
            status = line
        i += 1
    if status is None:
        raise AnswerSetParseError("no SATISFIABLE/UNSATISFIABLE marker in solver output")
    if status == "SATISFIABLE":
        if not sets:
            raise AnswerSetParseError("SATISFIABLE without any answer set")
        return "SAT", sets
    if status == "UNSATISFIABLE":
        return "UNSAT", []
    raise AnswerSetParseError("solver reported UNKNOWN")


def solver_argv(command: str, max_models: int) -> list[str]:
    """Split a command template; ``{models}`` is replaced by the model limit."""
    argv = shlex.split(command)
    if not argv:
        raise SolverError("empty solver command")
    if any("{models}" in a for a in argv):
        return [a.replace("{models}", str(max_models)) for a in argv]
    return argv


def run_solver(p: AspProgram, command: str, max_models: int = 0,
               timeout: float = DEFAULT_TIMEOUT) -> SolverResult:
    """Feed the program to a solver on standard input and parse what it prints.

    The exit status is not trusted (clingo uses 10/20/30 for success); the
    status is read from the output text instead.
    """
    text = emit(p)
    try:
        argv = solver_argv(command, max_models)
        proc = subprocess.run(argv, input=text, capture_output=True, text=True,
                              timeout=timeout)
    except FileNotFoundError as e:
        return SolverResult("ERROR", error=f"solver executable not found: {e.filename}")
    except subprocess.TimeoutExpired:
        return SolverResult("ERROR", error=f"solver timed out after {timeout:g} s")
    except (OSError, SolverError) as e:
        return SolverResult("ERROR", error=str(e))
    raw = proc.stdout
    try:
        status, sets = parse_answer_sets(raw)
    except AnswerSetParseError as e:
        detail = proc.stderr.strip().splitlines()
        msg = f"{e} (exit status {proc.returncode})"
        if detail:
            msg += f": {detail[-1]}"
        return SolverResult("ERROR", raw_output=raw, error=msg)
    return SolverResult(status, sets, raw)


# ----------------------------------------------------------------- back-mapping


def answer_set_to_structure(atoms, out: TranslationOutput,
                            m: ModelExpansionProblem) -> Structure:
    """The structure encoded by an answer set of ``out.program``.

    Auxiliary atoms are dropped; graph predicates of functions are folded
    back into function tables.  Types and symbols interpreted by the input
    structure must come back unchanged.
    """
    nm = out.name_map
    norm = out.normalized
    s = m.structure
    types: dict[str, set] = {t: set() for t in norm.vocabulary.types}
    rels: dict[str, set] = {p: set() for p in norm.vocabulary.predicates}
    elements: dict[object, object] = {}
    for (kind, name), ident in nm.symbols.items():
        if kind == "element":
            elements[ident] = name
    for a in atoms:
        if nm.is_aux(a.predicate):
            continue
        key = nm.lookup(a.predicate)
        if key is None:
            raise BackMappingError(f"atom {a} is outside the expected base")
        kind, name = key
        try:
            args = tuple(x if isinstance(x, int) else elements[x] for x in a.args)
        except KeyError as e:
            raise BackMappingError(f"unknown constant {e.args[0]} in {a}") from None
        if kind == "type":
            if len(args) != 1:
                raise BackMappingError(f"type atom {a} must have one argument")
            types[name].add(args[0])
        elif kind == "predicate" and name in rels:
            if len(args) != len(norm.vocabulary.predicates[name]):
                raise BackMappingError(f"atom {a} has the wrong arity")
            rels[name].add(args)
        else:
            raise BackMappingError(f"atom {a} is outside the expected base")

    for t, elems in s.types.items():
        if types.get(t, set()) != set(elems):
            raise BackMappingError(f"type {t} differs from the input structure")

    v = m.vocabulary
    preds = {}
    for p in v.predicates:
        tuples = rels[p]
        if p in s.predicates and tuples != set(s.predicates[p]):
            raise BackMappingError(f"predicate {p} differs from the input structure")
        preds[p] = tuple(sorted(tuples, key=lambda t: tuple(map(element_key, t))))
    funcs = {}
    for fn, (arg_types, res) in v.functions.items():
        graph = rels[norm.function_renaming[fn]]
        table: dict[tuple, object] = {}
        for row in graph:
            key, val = row[:-1], row[-1]
            if key in table and table[key] != val:
                raise BackMappingError(f"{fn} maps {key} to both {table[key]} and {val}")
            table[key] = val
        expected = _domain_size(s, arg_types)
        if len(table) != expected:
            raise BackMappingError(f"{fn} is not total: {len(table)} of {expected} arguments")
        if fn in s.functions and table != s.functions[fn]:
            raise BackMappingError(f"function {fn} differs from the input structure")
        funcs[fn] = dict(sorted(table.items(), key=lambda kv: tuple(map(element_key, kv[0]))))
    return Structure(dict(s.types), preds, funcs)


def _domain_size(s: Structure, typing) -> int:
    n = 1
    for t in typing:
        n *= len(s.types[t])
    return n


def answer_sets_to_structures(sets, out: TranslationOutput,
                              m: ModelExpansionProblem) -> list[Structure]:
    """Back-map every answer set, dropping duplicates, in a stable order."""
    seen: set[Structure] = set()
    result = []
    for a in sets:
        st = answer_set_to_structure(a, out, m)
        if st not in seen:
            seen.add(st)
            result.append(st)
    result.sort(key=lambda st: st.sort_key())
    return result
