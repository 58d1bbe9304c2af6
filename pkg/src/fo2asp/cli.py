"""Command-line interface: translate, solve, check and compare.

Exit codes: 0 success, 10 no solution or not a model, 11 compare mismatch,
20 input error, 30 solver error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence, TextIO

from . import oracle
from .asp import emit
from .backend import answer_sets_to_structures, run_solver
from .errors import (
    BackMappingError, CapExceeded, Fo2AspError, InputError, SolverError, TranslationError,
)
from .parser import parse_problem, parse_structures
from .syntax import format_problem, format_structure
from .translate import translate
from .validate import validate_problem

EXIT_OK = 0
EXIT_NO_SOLUTION = 10
EXIT_MISMATCH = 11
EXIT_INPUT = 20
EXIT_SOLVER = 30

SOLVER_ENV = "FOLASP_SOLVER"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load(path: str):
    return validate_problem(parse_problem(_read(path)))


def _print_structures(structures, vocabulary, out: TextIO) -> None:
    for i, s in enumerate(structures, start=1):
        if i > 1:
            out.write("\n")
        out.write(f"// model {i}\n")
        out.write(format_structure(s, vocabulary))


def cmd_translate(args, out: TextIO, err: TextIO) -> int:
    m = _load(args.input)
    result = translate(m)
    if args.dump_normalized:
        err.write(format_problem(result.normalized.as_problem()))
    text = emit(result.program)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise InputError(f"cannot write {args.output}: {e.strerror}") from None
    else:
        out.write(text)
    if args.stats:
        for block, n in result.stats.items():
            err.write(f"{block}: {n}\n")
        err.write(f"total: {len(result.program)}\n")
        grounded = oracle.ground(result.program)
        atoms = {r.head for r in grounded if r.head is not None}
        err.write(f"ground rules: {len(grounded)}\n")
        err.write(f"ground atoms: {len(atoms)}\n")
    return EXIT_OK


def cmd_solve(args, out: TextIO, err: TextIO) -> int:
    m = _load(args.input)
    result = translate(m)
    limit = args.models or None
    command = args.solver or (None if args.builtin else os.environ.get(SOLVER_ENV))
    if command:
        res = run_solver(result.program, command, args.models, timeout=args.timeout)
        if res.status == "ERROR":
            raise SolverError(res.error)
        sets = res.answer_sets
    else:
        sets = oracle.solve(result.program, cap=args.cap, limit=limit)
    structures = answer_sets_to_structures(sets, result, m)
    if limit is not None:
        structures = structures[:limit]
    if not structures:
        out.write("UNSATISFIABLE\n")
        return EXIT_NO_SOLUTION
    _print_structures(structures, m.vocabulary, out)
    return EXIT_OK


def cmd_check(args, out: TextIO, err: TextIO) -> int:
    """One verdict line per structure in MODEL; all must be models for exit 0."""
    m = _load(args.input)
    structures = parse_structures(_read(args.model), m.vocabulary)
    if not structures:
        raise InputError(f"{args.model} contains no structure")
    ok = True
    for s2 in structures:
        good = oracle.check_model(m, s2)
        ok = ok and good
        out.write("MODEL\n" if good else "NOT A MODEL\n")
    return EXIT_OK if ok else EXIT_NO_SOLUTION


def cmd_compare(args, out: TextIO, err: TextIO) -> int:
    m = _load(args.input)
    expected = oracle.solve_bruteforce(m, cap=args.cap)
    result = translate(m)
    got = set(answer_sets_to_structures(oracle.solve(result.program), result, m))
    if got == expected:
        out.write(f"EQUAL: {len(got)} solutions\n")
        return EXIT_OK
    out.write(f"MISMATCH: oracle {len(expected)}, translation {len(got)}\n")
    key = lambda s: s.sort_key()  # noqa: E731
    for s in sorted(expected - got, key=key):
        out.write("// only in the oracle\n" + format_structure(s, m.vocabulary))
    for s in sorted(got - expected, key=key):
        out.write("// only in the translation\n" + format_structure(s, m.vocabulary))
    return EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fo2asp",
        description="Translate typed first-order model expansion problems to ASP.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("translate", help="print the ASP program")
    t.add_argument("input")
    t.add_argument("-o", "--output", help="write the program here instead of stdout")
    t.add_argument("--stats", action="store_true",
                   help="print statement counts and ground size on stderr")
    t.add_argument("--dump-normalized", action="store_true",
                   help="print the normalized problem on stderr")
    t.set_defaults(func=cmd_translate)

    s = sub.add_parser("solve", help="solve and print the solutions as structures")
    s.add_argument("input")
    how = s.add_mutually_exclusive_group()
    how.add_argument("--solver", help=f"solver command reading stdin; {{models}} is replaced "
                                      f"by the model limit (default: ${SOLVER_ENV})")
    how.add_argument("--builtin", action="store_true", help="use the built-in enumerator")
    s.add_argument("--models", type=int, default=0, help="maximum number of models, 0 = all")
    s.add_argument("--timeout", type=float, default=60.0, help="solver timeout in seconds")
    s.add_argument("--cap", type=int, default=2 ** 22,
                   help="largest component search space for the built-in enumerator")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="check a structure against the problem")
    c.add_argument("input")
    c.add_argument("model")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("compare", help="compare translated solutions with brute force")
    k.add_argument("input")
    k.add_argument("--cap", type=int, default=10 ** 6, help="largest brute-force search space")
    k.set_defaults(func=cmd_compare)
    return ap


def run_cli(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if getattr(args, "models", 0) < 0:
        err.write("error: --models must be non-negative\n")
        return EXIT_INPUT
    try:
        return args.func(args, out, err)
    except (SolverError, BackMappingError) as e:
        err.write(f"solver error: {e}\n")
        return EXIT_SOLVER
    except (InputError, TranslationError, CapExceeded) as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT
    except Fo2AspError as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
