"""HCSP abstract syntax.

Sequential commands and parallel composition share one ``Process`` base class;
the two-level grammar (parallel only above sequential commands) is enforced
at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from ..exceptions import InvalidProcessError
from ..symbolic.expr import TRUE, BExpr, Expr

Direction = Literal["?", "!"]


class Process:
    """Base class of HCSP processes."""

    __slots__ = ()

    def __str__(self) -> str:
        from .printer import pretty

        return pretty(self)


def _require_sequential(*parts: Process) -> None:
    for part in parts:
        if isinstance(part, Parallel):
            raise InvalidProcessError(
                "Parallel composition cannot appear inside a sequential command"
            )


@dataclass(frozen=True, slots=True)
class Skip(Process):
    pass


@dataclass(frozen=True, slots=True)
class Assign(Process):
    var: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class Input(Process):
    ch: str
    var: str


@dataclass(frozen=True, slots=True)
class Output(Process):
    ch: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class Seq(Process):
    first: Process
    second: Process

    def __post_init__(self):
        _require_sequential(self.first, self.second)


@dataclass(frozen=True, slots=True)
class IChoice(Process):
    left: Process
    right: Process

    def __post_init__(self):
        _require_sequential(self.left, self.right)


@dataclass(frozen=True, slots=True)
class Repeat(Process):
    body: Process

    def __post_init__(self):
        _require_sequential(self.body)


@dataclass(frozen=True, slots=True)
class Cond(Process):
    cond: BExpr
    then: Process
    else_: Process

    def __post_init__(self):
        _require_sequential(self.then, self.else_)


def _check_equations(eqs: tuple[tuple[str, Expr], ...]) -> None:
    names = [name for name, _ in eqs]
    if not names:
        raise InvalidProcessError("ODE needs at least one equation")
    if len(set(names)) != len(names):
        raise InvalidProcessError(f"ODE variables must be distinct: {', '.join(names)}")


@dataclass(frozen=True, slots=True)
class ODE(Process):
    eqs: tuple[tuple[str, Expr], ...]
    domain: BExpr = TRUE

    def __post_init__(self):
        _check_equations(self.eqs)


@dataclass(frozen=True, slots=True)
class Wait(Process):
    delay: Expr


@dataclass(frozen=True, slots=True)
class CommBranch:
    """One ``ch?x -> c`` or ``ch!e -> c`` branch of an interrupt."""

    direction: Direction
    ch: str
    var: str | None = None
    expr: Expr | None = None
    cont: Process = Skip()

    def __post_init__(self):
        if self.direction == "?" and (self.var is None or self.expr is not None):
            raise InvalidProcessError(f"Input branch on {self.ch} needs a variable only")
        if self.direction == "!" and (self.expr is None or self.var is not None):
            raise InvalidProcessError(f"Output branch on {self.ch} needs an expression only")
        _require_sequential(self.cont)


@dataclass(frozen=True, slots=True)
class Interrupt(Process):
    eqs: tuple[tuple[str, Expr], ...]
    domain: BExpr
    tail: Process
    branches: tuple[CommBranch, ...]

    def __post_init__(self):
        _check_equations(self.eqs)
        if not self.branches:
            raise InvalidProcessError("Interrupt needs at least one communication branch")
        _require_sequential(self.tail)


@dataclass(frozen=True, slots=True)
class Parallel(Process):
    left: Process
    chans: frozenset[str]
    right: Process


def is_sequential(p: Process) -> bool:
    return not isinstance(p, Parallel)


def seq(*parts: Process) -> Process:
    """Right-associated sequence, ``skip`` for no parts."""
    if not parts:
        return Skip()
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Seq(part, result)
    return result
