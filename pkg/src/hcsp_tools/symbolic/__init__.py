"""Symbolic arithmetic, states, simplification and SMT-LIB export."""

from .evaluate import State, evaluate, evaluate_float
from .expr import (
    FALSE,
    TIME,
    TRUE,
    BExpr,
    Bound,
    Const,
    Expr,
    FreshTime,
    Var,
    conj,
    disj,
    free_atoms,
    fresh_bound,
    negate,
    program_vars,
    substitute,
    substitute_many,
)
from .printer import pretty, pretty_bexpr, pretty_expr
from .simplify import linear_in, simplify, to_nnf
from .smtlib import build_script, to_smtlib

__all__ = [
    "FALSE",
    "TIME",
    "TRUE",
    "BExpr",
    "Bound",
    "Const",
    "Expr",
    "FreshTime",
    "State",
    "Var",
    "build_script",
    "conj",
    "disj",
    "evaluate",
    "evaluate_float",
    "free_atoms",
    "fresh_bound",
    "linear_in",
    "negate",
    "pretty",
    "pretty_bexpr",
    "pretty_expr",
    "program_vars",
    "simplify",
    "substitute",
    "substitute_many",
    "to_nnf",
    "to_smtlib",
]
