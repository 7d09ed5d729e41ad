"""Pretty-printer producing text the parser reads back to an equal AST."""

from __future__ import annotations

from ..symbolic.printer import pretty_bexpr, pretty_expr
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
from .parser import DOT_SUFFIX


def _expr(e) -> str:
    return pretty_expr(e, "code")


def _bexpr(b) -> str:
    return pretty_bexpr(b, "code")


def _equations(eqs) -> str:
    return ", ".join(f"{name}{DOT_SUFFIX}={_expr(rhs)}" for name, rhs in eqs)


def _branch(branch: CommBranch) -> str:
    if branch.direction == "?":
        head = f"{branch.ch}?{branch.var}"
    else:
        head = f"{branch.ch}!{_expr(branch.expr)}"
    return f"{head} -> {pretty(branch.cont)}"


def pretty(p: Process) -> str:
    """Render a process in the concrete grammar."""
    match p:
        case Skip():
            return "skip"
        case Assign(var, expr):
            return f"{var} := {_expr(expr)}"
        case Input(ch, var):
            return f"{ch}?{var}"
        case Output(ch, expr):
            return f"{ch}!{_expr(expr)}"
        case Wait(delay):
            return f"wait {_expr(delay)}"
        case Seq(first, second):
            left = pretty(first)
            if isinstance(first, Seq | IChoice):
                left = f"({left})"
            right = pretty(second)
            if isinstance(second, IChoice):
                right = f"({right})"
            return f"{left}; {right}"
        case IChoice(left, right):
            right_text = pretty(right)
            if isinstance(right, IChoice):
                right_text = f"({right_text})"
            return f"{pretty(left)} $ {right_text}"
        case Repeat(body):
            return f"({pretty(body)})*"
        case Cond(cond, then, else_):
            return f"if {_bexpr(cond)} then {pretty(then)} else {pretty(else_)} endif"
        case ODE(eqs, domain):
            return f"<{_equations(eqs)} & {_bexpr(domain)}>"
        case Interrupt(eqs, domain, tail, branches):
            tail_text = "" if tail == Skip() else f" |> {pretty(tail)}"
            body = ", ".join(_branch(b) for b in branches)
            return f"<{_equations(eqs)} & {_bexpr(domain)}{tail_text}> |> [] ({body})"
        case Parallel(left, chans, right):
            right_text = pretty(right)
            if isinstance(right, Parallel):
                right_text = f"({right_text})"
            return f"{pretty(left)} ||[{','.join(sorted(chans))}] {right_text}"
    raise TypeError(f"not a process: {p!r}")
