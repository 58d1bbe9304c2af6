"""Translate typed first-order model expansion problems to answer set programs."""

from .asp import AspProgram, emit, parse_program
from .normalize import normalize
from .parser import parse_problem, parse_structure
from .translate import translate
from .validate import validate_problem

__version__ = "0.1.0"

__all__ = [
    "AspProgram", "emit", "parse_program", "normalize", "parse_problem", "parse_structure",
    "translate", "validate_problem",
]
