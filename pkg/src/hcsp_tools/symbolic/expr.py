"""Symbolic arithmetic and boolean expressions.

Expressions are immutable trees with exact rational constants. Three kinds of
atoms occur in them:

- ``Var``: a program variable, possibly carrying a process prefix ("Av").
- ``Bound``: a variable introduced by a binder (delay ``d``, value ``v``,
  existential witnesses) or the path time ``t``. Every binder draws a fresh
  ``uid`` so two binders never share a variable.
- ``FreshTime``: a boundary time ``t1``, ``t2``, ... created for an ODE domain.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, TypeAlias

_uids = itertools.count(1)


class Expr:
    """Base class for arithmetic expressions."""

    __slots__ = ()

    def __add__(self, other: ExprLike) -> Expr:
        return Add(self, as_expr(other))

    def __radd__(self, other: ExprLike) -> Expr:
        return Add(as_expr(other), self)

    def __sub__(self, other: ExprLike) -> Expr:
        return Sub(self, as_expr(other))

    def __rsub__(self, other: ExprLike) -> Expr:
        return Sub(as_expr(other), self)

    def __mul__(self, other: ExprLike) -> Expr:
        return Mul(self, as_expr(other))

    def __rmul__(self, other: ExprLike) -> Expr:
        return Mul(as_expr(other), self)

    def __truediv__(self, other: ExprLike) -> Expr:
        return Div(self, as_expr(other))

    def __rtruediv__(self, other: ExprLike) -> Expr:
        return Div(as_expr(other), self)

    def __neg__(self) -> Expr:
        return Neg(self)

    def __pow__(self, exponent: int) -> Expr:
        return Pow(self, exponent)

    def __str__(self) -> str:
        from .printer import pretty_expr

        return pretty_expr(self)


ExprLike: TypeAlias = "Expr | int | Fraction"


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Bound(Expr):
    name: str
    uid: int


@dataclass(frozen=True, slots=True)
class FreshTime(Expr):
    index: int

    @property
    def name(self) -> str:
        return f"t{self.index}"


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exp: int


Atom: TypeAlias = Var | Bound | FreshTime

# Path time of continuous evolution.
TIME = Bound("t", 0)

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def fresh_bound(name: str) -> Bound:
    """Create a bound variable that no other binder uses."""
    return Bound(name, next(_uids))


def as_expr(value: ExprLike) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(Fraction(value))


# ============================================================================
# Boolean expressions
# ============================================================================

CmpOp: TypeAlias = Literal["==", "<", "<=", ">", ">="]

NEGATED_CMP: dict[str, str] = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}
FLIPPED_CMP: dict[str, str] = {"==": "==", "<": ">", "<=": ">=", ">": "<", ">=": "<="}


class BExpr:
    """Base class for boolean expressions."""

    __slots__ = ()

    def __str__(self) -> str:
        from .printer import pretty_bexpr

        return pretty_bexpr(self)


@dataclass(frozen=True, slots=True)
class BConst(BExpr):
    value: bool


TRUE = BConst(True)
FALSE = BConst(False)


@dataclass(frozen=True, slots=True)
class Cmp(BExpr):
    op: CmpOp
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Not(BExpr):
    arg: BExpr


@dataclass(frozen=True, slots=True)
class And(BExpr):
    left: BExpr
    right: BExpr


@dataclass(frozen=True, slots=True)
class Or(BExpr):
    left: BExpr
    right: BExpr


@dataclass(frozen=True, slots=True)
class Implies(BExpr):
    left: BExpr
    right: BExpr


@dataclass(frozen=True, slots=True)
class Exists(BExpr):
    var: Bound
    body: BExpr


@dataclass(frozen=True, slots=True)
class Crossing(BExpr):
    """``var`` is the least nonnegative time at which ``along`` fails.

    ``along`` is the domain of an ODE with the solution already substituted,
    so it mentions the start-state variables and the path time ``TIME``.
    """

    var: FreshTime
    along: BExpr

    def necessary(self) -> BExpr:
        """Quantifier-free consequence used for evaluation and SMT export.

        At the least exit time the domain either fails or, for a closed
        boundary, one of its comparisons is tight.
        """
        at_crossing = substitute(self.along, TIME, self.var)
        tight = [Cmp("==", c.left, c.right) for c in comparisons(at_crossing)]
        return And(Cmp(">=", self.var, ZERO), disj(Not(at_crossing), *tight))


def eq(a: ExprLike, b: ExprLike) -> Cmp:
    return Cmp("==", as_expr(a), as_expr(b))


def lt(a: ExprLike, b: ExprLike) -> Cmp:
    return Cmp("<", as_expr(a), as_expr(b))


def le(a: ExprLike, b: ExprLike) -> Cmp:
    return Cmp("<=", as_expr(a), as_expr(b))


def gt(a: ExprLike, b: ExprLike) -> Cmp:
    return Cmp(">", as_expr(a), as_expr(b))


def ge(a: ExprLike, b: ExprLike) -> Cmp:
    return Cmp(">=", as_expr(a), as_expr(b))


def conj(*parts: BExpr) -> BExpr:
    """Left-associated conjunction dropping ``true`` and absorbing ``false``."""
    result: BExpr = TRUE
    for part in parts:
        if part == FALSE:
            return FALSE
        if part == TRUE:
            continue
        result = part if result == TRUE else And(result, part)
    return result


def disj(*parts: BExpr) -> BExpr:
    """Left-associated disjunction dropping ``false`` and absorbing ``true``."""
    result: BExpr = FALSE
    for part in parts:
        if part == TRUE:
            return TRUE
        if part == FALSE:
            continue
        result = part if result == FALSE else Or(result, part)
    return result


def negate(b: BExpr) -> BExpr:
    if isinstance(b, BConst):
        return BConst(not b.value)
    if isinstance(b, Not):
        return b.arg
    return Not(b)


def conjuncts(b: BExpr) -> Iterator[BExpr]:
    """Top-level conjuncts of ``b``."""
    if isinstance(b, And):
        yield from conjuncts(b.left)
        yield from conjuncts(b.right)
    elif b != TRUE:
        yield b


def comparisons(b: BExpr) -> Iterator[Cmp]:
    """Every comparison atom of a quantifier-free ``b``."""
    match b:
        case Cmp():
            yield b
        case Not(arg):
            yield from comparisons(arg)
        case And(l, r) | Or(l, r) | Implies(l, r):
            yield from comparisons(l)
            yield from comparisons(r)


# ============================================================================
# Traversal
# ============================================================================


def map_expr(e: Expr, leaf: Callable[[Expr], Expr]) -> Expr:
    """Rebuild ``e`` bottom-up, replacing every atom by ``leaf(atom)``."""
    match e:
        case Const():
            return e
        case Var() | Bound() | FreshTime():
            return leaf(e)
        case Neg(arg):
            return Neg(map_expr(arg, leaf))
        case Add(l, r):
            return Add(map_expr(l, leaf), map_expr(r, leaf))
        case Sub(l, r):
            return Sub(map_expr(l, leaf), map_expr(r, leaf))
        case Mul(l, r):
            return Mul(map_expr(l, leaf), map_expr(r, leaf))
        case Div(l, r):
            return Div(map_expr(l, leaf), map_expr(r, leaf))
        case Pow(base, n):
            return Pow(map_expr(base, leaf), n)
    raise TypeError(f"not an expression: {e!r}")


def map_bexpr(b: BExpr, leaf: Callable[[Expr], Expr]) -> BExpr:
    """Apply ``leaf`` to every atom of every expression inside ``b``.

    Variables bound by an enclosing ``Exists`` are left alone.
    """
    match b:
        case BConst():
            return b
        case Cmp(op, l, r):
            return Cmp(op, map_expr(l, leaf), map_expr(r, leaf))
        case Not(arg):
            return Not(map_bexpr(arg, leaf))
        case And(l, r):
            return And(map_bexpr(l, leaf), map_bexpr(r, leaf))
        case Or(l, r):
            return Or(map_bexpr(l, leaf), map_bexpr(r, leaf))
        case Implies(l, r):
            return Implies(map_bexpr(l, leaf), map_bexpr(r, leaf))
        case Exists(var, body):

            def inner(atom: Expr) -> Expr:
                return atom if atom == var else leaf(atom)

            return Exists(var, map_bexpr(body, inner))
        case Crossing(var, along):
            new_var = leaf(var)
            if not isinstance(new_var, FreshTime):
                raise TypeError(f"boundary time {var.name} replaced by {new_var!r}")
            return Crossing(new_var, map_bexpr(along, leaf))
    raise TypeError(f"not a boolean expression: {b!r}")


def iter_atoms(node: Expr | BExpr) -> Iterator[Atom]:
    """Free atoms of an expression or boolean expression, in order of occurrence."""
    match node:
        case Const() | BConst():
            return
        case Var() | Bound() | FreshTime():
            yield node
        case Neg(arg) | Not(arg):
            yield from iter_atoms(arg)
        case Pow(base, _):
            yield from iter_atoms(base)
        case Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r):
            yield from iter_atoms(l)
            yield from iter_atoms(r)
        case Cmp(_, l, r):
            yield from iter_atoms(l)
            yield from iter_atoms(r)
        case And(l, r) | Or(l, r) | Implies(l, r):
            yield from iter_atoms(l)
            yield from iter_atoms(r)
        case Exists(var, body):
            yield from (a for a in iter_atoms(body) if a != var)
        case Crossing(var, along):
            yield var
            yield from iter_atoms(along)
        case _:
            raise TypeError(f"not an expression: {node!r}")


def free_atoms(node: Expr | BExpr) -> frozenset[Atom]:
    return frozenset(iter_atoms(node))


def program_vars(node: Expr | BExpr) -> frozenset[str]:
    """Names of the program variables occurring free in ``node``."""
    return frozenset(a.name for a in iter_atoms(node) if isinstance(a, Var))


def substitute_many(node, mapping: Mapping[Atom, Expr]):
    """Simultaneously replace free atoms by expressions."""
    if not mapping:
        return node

    def leaf(atom: Expr) -> Expr:
        return mapping.get(atom, atom)  # type: ignore[call-overload]

    if isinstance(node, Expr):
        return map_expr(node, leaf)
    return map_bexpr(node, leaf)


def substitute(node, x: str | Atom, r: Expr):
    """Replace every free occurrence of ``x`` in ``node`` by ``r``."""
    atom = Var(x) if isinstance(x, str) else x
    return substitute_many(node, {atom: r})


def rename_vars(node, rename: Callable[[str], str]):
    """Rename program variables, leaving bound variables and boundary times alone."""

    def leaf(atom: Expr) -> Expr:
        return Var(rename(atom.name)) if isinstance(atom, Var) else atom

    if isinstance(node, Expr):
        return map_expr(node, leaf)
    return map_bexpr(node, leaf)


def denominators(e: Expr) -> Iterator[Expr]:
    """Every divisor occurring in ``e``."""
    match e:
        case Div(l, r):
            yield from denominators(l)
            yield from denominators(r)
            yield r
        case Neg(arg) | Pow(arg, _):
            yield from denominators(arg)
        case Add(l, r) | Sub(l, r) | Mul(l, r):
            yield from denominators(l)
            yield from denominators(r)
