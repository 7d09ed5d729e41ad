"""HCSP syntax: AST, parser and pretty-printer."""

from .analysis import channels, free_vars, rename_process
from .ast import (
    ODE,
    Assign,
    CommBranch,
    Cond,
    IChoice,
    Input,
    Interrupt,
    Output,
    Parallel,
    Process,
    Repeat,
    Seq,
    Skip,
    Wait,
    seq,
)
from .parser import parse, parse_bexpr, parse_expr
from .printer import pretty

__all__ = [
    "ODE",
    "Assign",
    "CommBranch",
    "Cond",
    "IChoice",
    "Input",
    "Interrupt",
    "Output",
    "Parallel",
    "Process",
    "Repeat",
    "Seq",
    "Skip",
    "Wait",
    "channels",
    "free_vars",
    "parse",
    "parse_bexpr",
    "parse_expr",
    "pretty",
    "rename_process",
    "seq",
]
