"""Process prefixes: every program variable ``x`` of process ``A`` becomes ``Ax``.

Prefixing makes the variable sets of parallel components disjoint, so
lifting an expression to the merged state is the identity on syntax.
"""

from __future__ import annotations

from collections.abc import Callable, Collection
from dataclasses import dataclass
from typing import TypeVar

from ..assertions.assn import (
    Assertion,
    Binder,
    BoolLift,
    CommSpec,
    ExprBinder,
    InSpec,
    Interrupt,
    InterruptInf,
    IOSync,
    OutSpec,
    Subst,
    Wait,
    WaitIn,
    WaitOutv,
    children,
    free_vars,
    with_children,
)
from ..assertions.path import PathAssertion, path_map, sol_path
from ..exceptions import MixedPrefixError, NameCollisionError
from ..symbolic.expr import BExpr, Expr, program_vars, rename_vars

N = TypeVar("N", Expr, BExpr)


@dataclass(frozen=True)
class NamedAssertion:
    """An assertion whose program variables all carry one of ``prefixes``."""

    prefixes: tuple[str, ...]
    assertion: Assertion
    variables: frozenset[str]

    @property
    def name(self) -> str:
        return "".join(self.prefixes)

    def __str__(self) -> str:
        return f"{self.name}: {self.assertion}"


def prefix_process(
    name: str, a: Assertion | NamedAssertion, taken: Collection[str] = ()
) -> NamedAssertion:
    """Rename every program variable ``x`` of ``a`` to ``name + x``."""
    if isinstance(a, NamedAssertion):
        raise NameCollisionError(
            f"Assertion of {a.name} is already prefixed; cannot prefix it with {name!r}"
        )
    if not name or not name.isidentifier():
        raise NameCollisionError(f"Process name {name!r} is not a usable prefix")
    if name in taken:
        raise NameCollisionError(f"Process name {name!r} is already in use")
    renamed = rename_assertion(a, lambda x: name + x)
    return NamedAssertion((name,), renamed, free_vars(renamed))


def merge_named(left: NamedAssertion, right: NamedAssertion, a: Assertion) -> NamedAssertion:
    """The named assertion of a parallel composition of ``left`` and ``right``."""
    return NamedAssertion(
        (*left.prefixes, *right.prefixes), a, left.variables | right.variables
    )


def check_disjoint(left: NamedAssertion, right: NamedAssertion) -> None:
    shared_names = set(left.prefixes) & set(right.prefixes)
    if shared_names:
        raise NameCollisionError(f"Process names used twice: {', '.join(sorted(shared_names))}")
    shared = left.variables & right.variables
    if shared:
        raise NameCollisionError(
            f"Prefixed variables of {left.name} and {right.name} collide: "
            f"{', '.join(sorted(shared))}"
        )


def lift(node: N, side: NamedAssertion | str) -> N:
    """``node`` read over the merged state; only checks that it stays on ``side``."""
    names = program_vars(node)
    if isinstance(side, NamedAssertion):
        foreign = names - side.variables
        label = side.name
    else:
        foreign = frozenset(n for n in names if not n.startswith(side))
        label = side
    if foreign:
        raise MixedPrefixError(
            f"Expression {node} mixes variables of {label} with {', '.join(sorted(foreign))}"
        )
    return node


# ============================================================================
# Renaming
# ============================================================================


def rename_assertion(a: Assertion, rename: Callable[[str], str]) -> Assertion:
    """Rename program variables everywhere, substitution targets and paths included."""

    def ex(e):
        return rename_vars(e, rename)

    def rec(node: Assertion) -> Assertion:
        return rename_assertion(node, rename)

    def path(p: PathAssertion) -> PathAssertion:
        return sol_path({rename(x): ex(e) for x, e in path_map(p).items()})

    def binder(b: Binder) -> Binder:
        return Binder(b.params, rec(b.body))

    def comm(c: CommSpec) -> CommSpec:
        if isinstance(c, InSpec):
            return InSpec(c.ch, binder(c.body))
        return OutSpec(c.ch, ExprBinder(c.value.params, ex(c.value.expr)), binder(c.body))

    match a:
        case BoolLift(cond, body):
            return BoolLift(ex(cond), rec(body))
        case Subst(body, pairs):
            return Subst(rec(body), tuple(sorted((rename(x), ex(e)) for x, e in pairs)))
        case IOSync(ch, value, body):
            return IOSync(ch, ex(value), rec(body))
        case WaitIn(p, ch, b):
            return WaitIn(path(p), ch, binder(b))
        case WaitOutv(p, ch, value, b):
            return WaitOutv(path(p), ch, ex(value), binder(b))
        case Wait(p, delay, b):
            return Wait(path(p), ex(delay), binder(b))
        case Interrupt(p, delay, tail, comms):
            return Interrupt(path(p), ex(delay), binder(tail), tuple(comm(c) for c in comms))
        case InterruptInf(p, comms):
            return InterruptInf(path(p), tuple(comm(c) for c in comms))
    return with_children(a, tuple(rec(c) for c in children(a)))
