"""Syntactic queries and renaming over processes."""

from __future__ import annotations

from collections.abc import Callable

from ..symbolic.expr import program_vars, rename_vars
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
)


def free_vars(p: Process) -> frozenset[str]:
    """Every program variable read or written by ``p``."""
    match p:
        case Skip():
            return frozenset()
        case Assign(var, expr):
            return frozenset({var}) | program_vars(expr)
        case Input(_, var):
            return frozenset({var})
        case Output(_, expr) | Wait(expr):
            return program_vars(expr)
        case Seq(a, b) | IChoice(a, b):
            return free_vars(a) | free_vars(b)
        case Repeat(body):
            return free_vars(body)
        case Cond(cond, then, else_):
            return program_vars(cond) | free_vars(then) | free_vars(else_)
        case ODE(eqs, domain):
            return _equation_vars(eqs) | program_vars(domain)
        case Interrupt(eqs, domain, tail, branches):
            result = _equation_vars(eqs) | program_vars(domain) | free_vars(tail)
            for branch in branches:
                result |= _branch_vars(branch)
            return result
        case Parallel(left, _, right):
            return free_vars(left) | free_vars(right)
    raise TypeError(f"not a process: {p!r}")


def _equation_vars(eqs) -> frozenset[str]:
    result: frozenset[str] = frozenset(name for name, _ in eqs)
    for _, rhs in eqs:
        result |= program_vars(rhs)
    return result


def _branch_vars(branch: CommBranch) -> frozenset[str]:
    own = frozenset({branch.var}) if branch.var else program_vars(branch.expr)
    return own | free_vars(branch.cont)


def channels(p: Process) -> frozenset[str]:
    """Every channel name occurring in ``p``."""
    match p:
        case Input(ch, _) | Output(ch, _):
            return frozenset({ch})
        case Seq(a, b) | IChoice(a, b):
            return channels(a) | channels(b)
        case Repeat(body):
            return channels(body)
        case Cond(_, then, else_):
            return channels(then) | channels(else_)
        case Interrupt(_, _, tail, branches):
            result = channels(tail)
            for branch in branches:
                result |= {branch.ch} | channels(branch.cont)
            return result
        case Parallel(left, chans, right):
            return channels(left) | chans | channels(right)
    return frozenset()


def map_vars(p: Process, rename: Callable[[str], str]) -> Process:
    """Rename every program variable of ``p``."""

    def eqs_of(eqs):
        return tuple((rename(name), rename_vars(rhs, rename)) for name, rhs in eqs)

    match p:
        case Skip():
            return p
        case Assign(var, expr):
            return Assign(rename(var), rename_vars(expr, rename))
        case Input(ch, var):
            return Input(ch, rename(var))
        case Output(ch, expr):
            return Output(ch, rename_vars(expr, rename))
        case Wait(delay):
            return Wait(rename_vars(delay, rename))
        case Seq(a, b):
            return Seq(map_vars(a, rename), map_vars(b, rename))
        case IChoice(a, b):
            return IChoice(map_vars(a, rename), map_vars(b, rename))
        case Repeat(body):
            return Repeat(map_vars(body, rename))
        case Cond(cond, then, else_):
            return Cond(rename_vars(cond, rename), map_vars(then, rename), map_vars(else_, rename))
        case ODE(eqs, domain):
            return ODE(eqs_of(eqs), rename_vars(domain, rename))
        case Interrupt(eqs, domain, tail, branches):
            return Interrupt(
                eqs_of(eqs),
                rename_vars(domain, rename),
                map_vars(tail, rename),
                tuple(
                    CommBranch(
                        b.direction,
                        b.ch,
                        rename(b.var) if b.var else None,
                        rename_vars(b.expr, rename) if b.expr is not None else None,
                        map_vars(b.cont, rename),
                    )
                    for b in branches
                ),
            )
        case Parallel(left, chans, right):
            return Parallel(map_vars(left, rename), chans, map_vars(right, rename))
    raise TypeError(f"not a process: {p!r}")


def rename_process(p: Process, prefix: str) -> Process:
    """Prefix every program variable with ``prefix``."""
    return map_vars(p, lambda name: prefix + name)
