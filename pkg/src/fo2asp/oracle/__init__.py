"""Brute-force reference semantics used to check the translation."""

from .asp import ground, solve, stable_models
from .fo import (
    check_model, eval_formula, satisfying_tuples, search_space_size, solve_bruteforce,
    well_founded_model,
)

__all__ = [
    "ground", "solve", "stable_models", "check_model", "eval_formula", "satisfying_tuples",
    "search_space_size", "solve_bruteforce", "well_founded_model",
]
