"""Parameterized assertions over (start state, final state, trace).

Binders carry their parameters as ``Bound`` atoms with run-unique ids;
instantiating a binder substitutes those atoms, so composing delays never
captures an outer name.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass
from typing import Literal

from ..exceptions import InvalidProcessError
from ..symbolic.expr import (
    Atom,
    BExpr,
    Bound,
    Expr,
    Var,
    fresh_bound,
    iter_atoms,
    substitute_many,
)
from ..symbolic.simplify import simplify
from .path import PathAssertion, map_path_atoms, path_atoms, path_map

Direction = Literal["?", "!"]


class Assertion:
    """Base class of parameterized assertions."""

    __slots__ = ()

    def __str__(self) -> str:
        from .printer import pretty_assertion

        return pretty_assertion(self)


@dataclass(frozen=True, slots=True)
class Binder:
    """``{(p1, ..., pn) ⇒ body}``."""

    params: tuple[Bound, ...]
    body: Assertion

    def instantiate(self, *args: Expr) -> Assertion:
        if len(args) != len(self.params):
            raise ValueError(f"binder takes {len(self.params)} arguments, got {len(args)}")
        return subst_atoms(self.body, dict(zip(self.params, args, strict=True)))


@dataclass(frozen=True, slots=True)
class ExprBinder:
    """``{(p1, ..., pn) ⇒ expr}``."""

    params: tuple[Bound, ...]
    expr: Expr

    def instantiate(self, *args: Expr) -> Expr:
        mapping = dict(zip(self.params, args, strict=True))
        return simplify(substitute_many(self.expr, mapping))


def bind(names: tuple[str, ...], make: Callable[..., Assertion]) -> Binder:
    """Build a binder with fresh parameters named ``names``."""
    params = tuple(fresh_bound(name) for name in names)
    return Binder(params, make(*params))


def bind_expr(names: tuple[str, ...], make: Callable[..., Expr]) -> ExprBinder:
    params = tuple(fresh_bound(name) for name in names)
    return ExprBinder(params, make(*params))


# ============================================================================
# Constructors
# ============================================================================

@dataclass(frozen=True, slots=True)
class TrueAssn(Assertion):
    pass


@dataclass(frozen=True, slots=True)
class FalseAssn(Assertion):
    pass


@dataclass(frozen=True, slots=True)
class Init(Assertion):
    pass

TRUE_A = TrueAssn()
FALSE_A = FalseAssn()
INIT = Init()


@dataclass(frozen=True, slots=True)
class Conj(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True, slots=True)
class Disj(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True, slots=True)
class BoolLift(Assertion):
    """``↑cond ∧ body``."""

    cond: BExpr
    body: Assertion


@dataclass(frozen=True, slots=True)
class Subst(Assertion):
    """``body[x1 := e1, ..., xn := en]``, a simultaneous substitution on the start state."""

    body: Assertion
    pairs: tuple[tuple[str, Expr], ...]

    def mapping(self) -> dict[str, Expr]:
        return dict(self.pairs)


@dataclass(frozen=True, slots=True)
class IOSync(Assertion):
    """The trace starts with the synchronized event ``⟨ch, value⟩``, then ``body``."""

    ch: str
    value: Expr
    body: Assertion


@dataclass(frozen=True, slots=True)
class InSpec:
    ch: str
    body: Binder  # (d, v)

    @property
    def direction(self) -> Direction:
        return "?"


@dataclass(frozen=True, slots=True)
class OutSpec:
    ch: str
    value: ExprBinder  # d
    body: Binder  # d

    @property
    def direction(self) -> Direction:
        return "!"

CommSpec = InSpec | OutSpec


@dataclass(frozen=True, slots=True)
class WaitIn(Assertion):
    path: PathAssertion
    ch: str
    body: Binder  # (d, v)


@dataclass(frozen=True, slots=True)
class WaitOutv(Assertion):
    path: PathAssertion
    ch: str
    value: Expr
    body: Binder  # d


@dataclass(frozen=True, slots=True)
class Wait(Assertion):
    path: PathAssertion
    delay: Expr
    body: Binder  # d


@dataclass(frozen=True, slots=True)
class Interrupt(Assertion):
    path: PathAssertion
    delay: Expr
    tail: Binder  # d
    comms: tuple[CommSpec, ...]


@dataclass(frozen=True, slots=True)
class InterruptInf(Assertion):
    path: PathAssertion
    comms: tuple[CommSpec, ...]

    def __post_init__(self):
        if not self.comms:
            raise InvalidProcessError("interrupt∞ needs at least one communication")


@dataclass(frozen=True, slots=True)
class Rec(Assertion):
    """``Rec name. base ∨ step``; ``step`` mentions ``RecVar(name)`` as its hole."""

    name: str
    base: Assertion
    step: Assertion


@dataclass(frozen=True, slots=True)
class RecVar(Assertion):
    name: str


@dataclass(frozen=True, slots=True)
class SyncResidual(Assertion):
    chs: frozenset[str]
    left: Assertion
    right: Assertion


def conj_a(*parts: Assertion) -> Assertion:
    """Left-associated conjunction; a ``false`` part absorbs, ``true`` parts drop."""
    result: Assertion | None = None
    for part in parts:
        if part == FALSE_A:
            return FALSE_A
        if part == TRUE_A:
            continue
        result = part if result is None else Conj(result, part)
    return result or TRUE_A


def disj_a(*parts: Assertion) -> Assertion:
    """Left-associated disjunction without ``false`` disjuncts."""
    result: Assertion | None = None
    for part in parts:
        if part == FALSE_A:
            continue
        result = part if result is None else Disj(result, part)
    return result or FALSE_A


# ============================================================================
# Generic traversal
# ============================================================================

def _map_binder(b: Binder, fn: Callable[[Assertion], Assertion]) -> Binder:
    return Binder(b.params, fn(b.body))


def _map_comm(c: CommSpec, fn: Callable[[Assertion], Assertion]) -> CommSpec:
    if isinstance(c, InSpec):
        return InSpec(c.ch, _map_binder(c.body, fn))
    return OutSpec(c.ch, c.value, _map_binder(c.body, fn))


def children(a: Assertion) -> tuple[Assertion, ...]:
    """Direct sub-assertions, binder bodies included, in a fixed order."""
    match a:
        case Conj(l, r) | Disj(l, r):
            return (l, r)
        case BoolLift(_, body) | Subst(body, _) | IOSync(_, _, body):
            return (body,)
        case WaitIn(_, _, b) | WaitOutv(_, _, _, b) | Wait(_, _, b):
            return (b.body,)
        case Interrupt(_, _, tail, comms):
            return (tail.body, *(c.body.body for c in comms))
        case InterruptInf(_, comms):
            return tuple(c.body.body for c in comms)
        case Rec(_, base, step):
            return (base, step)
        case SyncResidual(_, l, r):
            return (l, r)
    return ()


def with_children(a: Assertion, new: tuple[Assertion, ...]) -> Assertion:
    """Rebuild ``a`` with replaced children (same order as ``children``)."""
    it = iter(new)

    def take(_: Assertion) -> Assertion:
        return next(it)

    match a:
        case Conj(l, r):
            return Conj(take(l), take(r))
        case Disj(l, r):
            return Disj(take(l), take(r))
        case BoolLift(cond, body):
            return BoolLift(cond, take(body))
        case Subst(body, pairs):
            return Subst(take(body), pairs)
        case IOSync(ch, value, body):
            return IOSync(ch, value, take(body))
        case WaitIn(path, ch, b):
            return WaitIn(path, ch, _map_binder(b, take))
        case WaitOutv(path, ch, value, b):
            return WaitOutv(path, ch, value, _map_binder(b, take))
        case Wait(path, delay, b):
            return Wait(path, delay, _map_binder(b, take))
        case Interrupt(path, delay, tail, comms):
            new_tail = _map_binder(tail, take)
            return Interrupt(path, delay, new_tail, tuple(_map_comm(c, take) for c in comms))
        case InterruptInf(path, comms):
            return InterruptInf(path, tuple(_map_comm(c, take) for c in comms))
        case Rec(name, base, step):
            return Rec(name, take(base), take(step))
        case SyncResidual(chs, l, r):
            return SyncResidual(chs, take(l), take(r))
    return a


def subst_atoms(a: Assertion, mapping: Mapping[Atom, Expr]) -> Assertion:
    """Substitute bound variables, boundary times or program variables everywhere.

    Every expression of ``a`` is replaced into and simplified; use
    ``push_subst`` for the start-state substitution ``P[x := e]``.
    """
    if not mapping:
        return a

    def ex(e: Expr) -> Expr:
        return simplify(substitute_many(e, mapping))

    def rec(node: Assertion) -> Assertion:
        return subst_atoms(node, mapping)

    match a:
        case BoolLift(cond, body):
            return BoolLift(simplify(substitute_many(cond, mapping)), rec(body))
        case Subst(body, pairs):
            return Subst(rec(body), tuple((x, ex(e)) for x, e in pairs))
        case IOSync(ch, value, body):
            return IOSync(ch, ex(value), rec(body))
        case WaitIn(path, ch, b):
            return WaitIn(map_path_atoms(path, mapping), ch, _map_binder(b, rec))
        case WaitOutv(path, ch, value, b):
            return WaitOutv(map_path_atoms(path, mapping), ch, ex(value), _map_binder(b, rec))
        case Wait(path, delay, b):
            return Wait(map_path_atoms(path, mapping), ex(delay), _map_binder(b, rec))
        case Interrupt(path, delay, tail, comms):
            return Interrupt(
                map_path_atoms(path, mapping),
                ex(delay),
                _map_binder(tail, rec),
                tuple(_subst_comm(c, mapping) for c in comms),
            )
        case InterruptInf(path, comms):
            return InterruptInf(
                map_path_atoms(path, mapping), tuple(_subst_comm(c, mapping) for c in comms)
            )
    return with_children(a, tuple(rec(child) for child in children(a)))


def _subst_comm(c: CommSpec, mapping: Mapping[Atom, Expr]) -> CommSpec:
    if isinstance(c, InSpec):
        return InSpec(c.ch, Binder(c.body.params, subst_atoms(c.body.body, mapping)))
    return OutSpec(
        c.ch,
        ExprBinder(c.value.params, simplify(substitute_many(c.value.expr, mapping))),
        Binder(c.body.params, subst_atoms(c.body.body, mapping)),
    )


def subst_rec_var(a: Assertion, name: str, replacement: Assertion) -> Assertion:
    """Fill the hole ``RecVar(name)``; inner recursions of the same name shadow it."""
    match a:
        case RecVar(n) if n == name:
            return replacement
        case Rec(n, _, _) if n == name:
            return a
    return with_children(a, tuple(subst_rec_var(c, name, replacement) for c in children(a)))


def unfold(rec: Rec, times: int) -> Assertion:
    """``base ∨ F(base) ∨ ... ∨ F^times(base)`` as nested hole filling."""
    current = rec.base
    for _ in range(times):
        current = Disj(rec.base, subst_rec_var(rec.step, rec.name, current))
    return current


def walk(a: Assertion) -> Iterator[Assertion]:
    yield a
    for child in children(a):
        yield from walk(child)


def leaf_count(a: Assertion) -> int:
    """Number of disjunctive branches; ``false`` counts as none."""
    match a:
        case FalseAssn():
            return 0
        case Disj(l, r):
            return leaf_count(l) + leaf_count(r)
        case Conj(l, r) | SyncResidual(_, l, r):
            return leaf_count(l) * leaf_count(r)
        case BoolLift(_, body) | Subst(body, _) | IOSync(_, _, body):
            return leaf_count(body)
        case WaitIn() | WaitOutv() | Wait():
            return leaf_count(children(a)[0])
        case Interrupt() | InterruptInf():
            return sum(leaf_count(c) for c in children(a))
        case Rec(_, base, step):
            return leaf_count(base) + leaf_count(step)
    return 1


def expressions(a: Assertion) -> Iterator[Expr | BExpr]:
    """Every expression stored directly in ``a`` (not in its children)."""
    match a:
        case BoolLift(cond, _):
            yield cond
        case Subst(_, pairs):
            yield from (e for _, e in pairs)
            yield from (Var(x) for x, _ in pairs)
        case IOSync(_, value, _):
            yield value
        case WaitOutv(_, _, value, _):
            yield value
        case Wait(_, delay, _) | Interrupt(_, delay, _, _):
            yield delay
    match a:
        case WaitIn(path) | WaitOutv(path) | Wait(path) | Interrupt(path) | InterruptInf(path):
            yield from path_atoms(path)
    match a:
        case Interrupt(_, _, _, comms) | InterruptInf(_, comms):
            for c in comms:
                if isinstance(c, OutSpec):
                    yield c.value.expr


def free_vars(a: Assertion) -> frozenset[str]:
    """Program variables mentioned anywhere in ``a``."""
    names: set[str] = set()
    for node in walk(a):
        for e in expressions(node):
            names.update(atom.name for atom in iter_atoms(e) if isinstance(atom, Var))
        if isinstance(node, WaitIn | WaitOutv | Wait | Interrupt | InterruptInf):
            names.update(path_map(node.path))
    return frozenset(names)


def rec_names(a: Assertion) -> frozenset[str]:
    return frozenset(node.name for node in walk(a) if isinstance(node, Rec | RecVar))
