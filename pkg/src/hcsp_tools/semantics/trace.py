"""Events and traces.

A continuous block stores its path as one closed-form expression over the
path time per state variable, so splitting a block at an inner time point is
exact.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import sympy

from ..exceptions import StateMergeError
from ..ready import ReadySet
from ..symbolic.evaluate import State, evaluate
from ..symbolic.expr import TIME, Add, Const, Expr, Var, substitute_many
from ..symbolic.sympy_bridge import SymbolTable, from_sympy, to_sympy

EventDirection = Literal["?", "!"] | None


@dataclass(frozen=True, slots=True)
class CommEvent:
    """``⟨ch?, v⟩``, ``⟨ch!, v⟩``, or the synchronized ``⟨ch, v⟩`` (no direction)."""

    ch: str
    direction: EventDirection
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, slots=True)
class ContEvent:
    """``⟨d, p, rdy⟩``: ``duration > 0`` units along ``path`` while waiting on ``rdy``."""

    duration: Fraction
    path: tuple[tuple[str, Expr], ...]
    rdy: ReadySet = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "duration", Fraction(self.duration))
        object.__setattr__(self, "path", tuple(sorted(self.path, key=lambda kv: kv[0])))
        if self.duration <= 0:
            raise ValueError(f"continuous block needs a positive duration, got {self.duration}")

    def state_at(self, t: Fraction) -> State:
        return State({name: evaluate(e, {}, {TIME: Fraction(t)}) for name, e in self.path})

    def final_state(self) -> State:
        return self.state_at(self.duration)

    def shifted(self, d: Fraction) -> ContEvent:
        """The remainder after the first ``d`` units."""
        return ContEvent(self.duration - d, shift_path_exprs(self.path, d), self.rdy)


@dataclass(frozen=True, slots=True)
class Deadlock:
    """The terminal marker ``δ``."""


DEADLOCK = Deadlock()

Event = CommEvent | ContEvent | Deadlock
Trace = tuple[Event, ...]


# ============================================================================
# Paths
# ============================================================================


def canonical(e: Expr) -> Expr:
    """Polynomial normal form in the path time."""
    table = SymbolTable()
    return from_sympy(sympy.expand(to_sympy(e, table)), table, order_by=TIME)


def constant_path(state: Mapping[str, Fraction]) -> tuple[tuple[str, Expr], ...]:
    return tuple((name, Const(value)) for name, value in sorted(state.items()))


def solution_path(
    state: Mapping[str, Fraction], solution: Mapping[str, Expr]
) -> tuple[tuple[str, Expr], ...]:
    """The path from ``state`` along ``solution``, closed over the start values."""
    start = {Var(name): Const(value) for name, value in state.items()}
    entries = []
    for name, value in sorted(state.items()):
        if name in solution:
            entries.append((name, canonical(substitute_many(solution[name], start))))
        else:
            entries.append((name, Const(value)))
    return tuple(entries)


def shift_path_exprs(path: Iterable[tuple[str, Expr]], d: Fraction) -> tuple[tuple[str, Expr], ...]:
    shift = {TIME: Add(TIME, Const(d))}
    return tuple((name, canonical(substitute_many(e, shift))) for name, e in path)


def merge_path_exprs(
    left: tuple[tuple[str, Expr], ...], right: tuple[tuple[str, Expr], ...]
) -> tuple[tuple[str, Expr], ...]:
    overlap = {name for name, _ in left} & {name for name, _ in right}
    if overlap:
        raise StateMergeError(f"Paths share variables: {', '.join(sorted(overlap))}")
    return tuple(sorted((*left, *right), key=lambda kv: kv[0]))


def is_deadlocked(tr: Trace) -> bool:
    return bool(tr) and isinstance(tr[-1], Deadlock)


def total_duration(tr: Trace) -> Fraction:
    return sum((e.duration for e in tr if isinstance(e, ContEvent)), Fraction(0))
