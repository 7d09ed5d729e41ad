"""Terminating rewrite-based simplification.

The rewrite set is fixed: constant folding, identity and annihilator laws,
flattening of ``+``/``-`` chains into signed terms with syntactic cancellation,
and flattening of ``*`` chains with sign extraction. The result is evaluation
equivalent to the input and ``simplify`` is idempotent.
"""

from __future__ import annotations

from fractions import Fraction
from functools import singledispatch

from .expr import (
    FALSE,
    NEGATED_CMP,
    TRUE,
    Add,
    And,
    BConst,
    BExpr,
    Bound,
    Cmp,
    Const,
    Crossing,
    Div,
    Exists,
    Expr,
    FreshTime,
    Implies,
    Mul,
    Neg,
    Not,
    Or,
    Pow,
    Sub,
    Var,
    free_atoms,
)

_CMP_FUNCS = {
    "==": lambda a, b: a == b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def simplify(node):
    """Simplify an ``Expr`` or ``BExpr``."""
    if isinstance(node, Expr):
        return _simplify_expr(node)
    return _simplify_bexpr(node)


# ============================================================================
# Arithmetic
# ============================================================================


def _simplify_expr(e: Expr) -> Expr:
    match e:
        case Const() | Var() | Bound() | FreshTime():
            return e
        case Neg() | Add() | Sub():
            return _simplify_sum(e)
        case Mul():
            return _simplify_product(e)
        case Div(l, r):
            left, right = _simplify_expr(l), _simplify_expr(r)
            if right == Const(1):
                return left
            if isinstance(left, Const) and isinstance(right, Const) and right.value:
                return Const(left.value / right.value)
            return Div(left, right)
        case Pow(base, n):
            b = _simplify_expr(base)
            if n == 0:
                return Const(1)
            if n == 1:
                return b
            if isinstance(b, Const) and (b.value != 0 or n > 0):
                return Const(b.value**n)
            return Pow(b, n)
    raise TypeError(f"not an expression: {e!r}")


def _collect_terms(
    e: Expr, sign: int, terms: list[tuple[int, Expr]], constant: list[Fraction | None]
) -> None:
    """Flatten ``e`` into signed non-additive terms.

    ``constant`` is a one-slot accumulator; ``None`` means no constant seen yet.
    The constant's position is marked by a placeholder entry in ``terms``.
    """
    match e:
        case Neg(arg):
            _collect_terms(arg, -sign, terms, constant)
            return
        case Add(l, r):
            _collect_terms(l, sign, terms, constant)
            _collect_terms(r, sign, terms, constant)
            return
        case Sub(l, r):
            _collect_terms(l, sign, terms, constant)
            _collect_terms(r, -sign, terms, constant)
            return

    s = _simplify_expr(e)
    if isinstance(s, Neg | Add | Sub):
        _collect_terms(s, sign, terms, constant)
        return
    if isinstance(s, Const):
        if constant[0] is None:
            constant[0] = Fraction(0)
            terms.append((0, s))  # placeholder for the folded constant
        constant[0] += sign * s.value
        return
    term_sign, term = _split_sign(s)
    terms.append((sign * term_sign, term))


def _split_sign(term: Expr) -> tuple[int, Expr]:
    """Pull a negative coefficient out of a simplified product."""
    if not isinstance(term, Mul):
        return 1, term
    factors = _flatten_mul(term)
    for i, factor in enumerate(factors):
        if isinstance(factor, Const) and factor.value < 0:
            magnitude = -factor.value
            rest = factors[:i] + ([Const(magnitude)] if magnitude != 1 else []) + factors[i + 1 :]
            return -1, _build_product(rest)
    return 1, term


def _flatten_mul(e: Expr) -> list[Expr]:
    if isinstance(e, Mul):
        return _flatten_mul(e.left) + _flatten_mul(e.right)
    return [e]


def _build_product(factors: list[Expr]) -> Expr:
    if not factors:
        return Const(1)
    result = factors[0]
    for factor in factors[1:]:
        result = Mul(result, factor)
    return result


def _simplify_sum(e: Expr) -> Expr:
    terms: list[tuple[int, Expr]] = []
    constant: list[Fraction | None] = [None]
    _collect_terms(e, 1, terms, constant)

    # Cancel identical terms of opposite sign.
    kept: list[tuple[int, Expr]] = []
    for sign, term in terms:
        if sign == 0:
            kept.append((sign, term))
            continue
        for i, (other_sign, other) in enumerate(kept):
            if other_sign == -sign and other == term:
                del kept[i]
                break
        else:
            kept.append((sign, term))

    resolved: list[tuple[int, Expr]] = []
    for sign, term in kept:
        if sign == 0:
            value = constant[0]
            assert value is not None
            if value > 0:
                resolved.append((1, Const(value)))
            elif value < 0:
                resolved.append((-1, Const(-value)))
        else:
            resolved.append((sign, term))

    if not resolved:
        return Const(0)

    # Lead with the first positive term so -(x - 5) reads as 5 - x.
    for i, (sign, _) in enumerate(resolved):
        if sign > 0:
            resolved.insert(0, resolved.pop(i))
            break

    first_sign, first = resolved[0]
    if first_sign > 0:
        result = first
    elif isinstance(first, Const):
        result = Const(-first.value)
    else:
        result = Neg(first)
    for sign, term in resolved[1:]:
        result = Add(result, term) if sign > 0 else Sub(result, term)
    return result


def _collect_factors(e: Expr, factors: list[Expr], state: dict) -> None:
    match e:
        case Mul(l, r):
            _collect_factors(l, factors, state)
            _collect_factors(r, factors, state)
            return
        case Neg(arg):
            state["coef"] = -state["coef"]
            _collect_factors(arg, factors, state)
            return

    s = _simplify_expr(e)
    if isinstance(s, Mul | Neg):
        _collect_factors(s, factors, state)
        return
    if isinstance(s, Const):
        state["coef"] *= s.value
        if state["position"] is None:
            state["position"] = len(factors)
        return
    factors.append(s)


def _simplify_product(e: Expr) -> Expr:
    factors: list[Expr] = []
    state: dict = {"coef": Fraction(1), "position": None}
    _collect_factors(e, factors, state)
    coef: Fraction = state["coef"]

    if coef == 0:
        return Const(0)
    if not factors:
        return Const(coef)
    if abs(coef) != 1:
        position = state["position"] or 0
        factors.insert(position, Const(coef))
        return _build_product(factors)
    product = _build_product(factors)
    return product if coef == 1 else Neg(product)


# ============================================================================
# Boolean
# ============================================================================


def _simplify_bexpr(b: BExpr) -> BExpr:
    match b:
        case BConst():
            return b
        case Cmp(op, l, r):
            left, right = _simplify_expr(l), _simplify_expr(r)
            if isinstance(left, Const) and isinstance(right, Const):
                return BConst(bool(_CMP_FUNCS[op](left.value, right.value)))
            if left == right:
                return TRUE if op in ("==", "<=", ">=") else FALSE
            return Cmp(op, left, right)
        case Not(arg):
            inner = _simplify_bexpr(arg)
            if isinstance(inner, BConst):
                return BConst(not inner.value)
            if isinstance(inner, Not):
                return inner.arg
            return Not(inner)
        case And(l, r):
            left, right = _simplify_bexpr(l), _simplify_bexpr(r)
            if FALSE in (left, right):
                return FALSE
            if left == TRUE or left == right:
                return right
            if right == TRUE:
                return left
            return And(left, right)
        case Or(l, r):
            left, right = _simplify_bexpr(l), _simplify_bexpr(r)
            if TRUE in (left, right):
                return TRUE
            if left == FALSE or left == right:
                return right
            if right == FALSE:
                return left
            return Or(left, right)
        case Implies(l, r):
            left, right = _simplify_bexpr(l), _simplify_bexpr(r)
            if left == FALSE or right == TRUE or left == right:
                return TRUE
            if left == TRUE:
                return right
            if right == FALSE:
                return _simplify_bexpr(Not(left))
            return Implies(left, right)
        case Exists(var, body):
            inner = _simplify_bexpr(body)
            if var not in free_atoms(inner):
                return inner
            return Exists(var, inner)
        case Crossing(var, along):
            return Crossing(var, _simplify_bexpr(along))
    raise TypeError(f"not a boolean expression: {b!r}")


# ============================================================================
# Normal forms and linearity
# ============================================================================


@singledispatch
def to_nnf(b: BExpr, positive: bool = True) -> BExpr:
    """Negation normal form: ``Not`` only above atoms it cannot be pushed into."""
    raise TypeError(f"not a boolean expression: {b!r}")


@to_nnf.register
def _(b: BConst, positive: bool = True) -> BExpr:
    return b if positive else BConst(not b.value)


@to_nnf.register
def _(b: Cmp, positive: bool = True) -> BExpr:
    if positive:
        return b
    if b.op == "==":
        return Or(Cmp("<", b.left, b.right), Cmp(">", b.left, b.right))
    return Cmp(NEGATED_CMP[b.op], b.left, b.right)  # type: ignore[arg-type]


@to_nnf.register
def _(b: Not, positive: bool = True) -> BExpr:
    return to_nnf(b.arg, not positive)


@to_nnf.register
def _(b: And, positive: bool = True) -> BExpr:
    left, right = to_nnf(b.left, positive), to_nnf(b.right, positive)
    return And(left, right) if positive else Or(left, right)


@to_nnf.register
def _(b: Or, positive: bool = True) -> BExpr:
    left, right = to_nnf(b.left, positive), to_nnf(b.right, positive)
    return Or(left, right) if positive else And(left, right)


@to_nnf.register
def _(b: Implies, positive: bool = True) -> BExpr:
    if positive:
        return Or(to_nnf(b.left, False), to_nnf(b.right, True))
    return And(to_nnf(b.left, True), to_nnf(b.right, False))


@to_nnf.register
def _(b: Exists, positive: bool = True) -> BExpr:
    inner = Exists(b.var, to_nnf(b.body, True))
    return inner if positive else Not(inner)


@to_nnf.register
def _(b: Crossing, positive: bool = True) -> BExpr:
    return b if positive else Not(b)


def linear_in(e: Expr, var: Expr) -> tuple[Expr, Expr] | None:
    """Split ``e`` as ``c0 + c1 * var`` with ``var`` free in neither part.

    Returns ``None`` when ``e`` is not linear in ``var``.
    """
    parts = _linear(e, var)
    if parts is None:
        return None
    c0, c1 = parts
    return _simplify_expr(c0), _simplify_expr(c1) if c1 is not None else Const(0)


def _linear(e: Expr, var: Expr) -> tuple[Expr, Expr | None] | None:
    if e == var:
        return Const(0), Const(1)
    if var not in free_atoms(e):
        return e, None
    match e:
        case Neg(arg):
            inner = _linear(arg, var)
            if inner is None:
                return None
            return Neg(inner[0]), None if inner[1] is None else Neg(inner[1])
        case Add(l, r) | Sub(l, r):
            left, right = _linear(l, var), _linear(r, var)
            if left is None or right is None:
                return None
            op = Add if isinstance(e, Add) else Sub
            c1 = _combine(left[1], right[1], op)
            return op(left[0], right[0]), c1
        case Mul(l, r):
            left, right = _linear(l, var), _linear(r, var)
            if left is None or right is None:
                return None
            if left[1] is None:
                return Mul(left[0], right[0]), None if right[1] is None else Mul(left[0], right[1])
            if right[1] is None:
                return Mul(left[0], right[0]), Mul(left[1], right[0])
            return None
        case Div(l, r):
            if var in free_atoms(r):
                return None
            left = _linear(l, var)
            if left is None:
                return None
            return Div(left[0], r), None if left[1] is None else Div(left[1], r)
        case Pow(_, 0):
            return Const(1), None
        case Pow(base, 1):
            return _linear(base, var)
    return None


def _combine(a: Expr | None, b: Expr | None, op) -> Expr | None:
    if a is None and b is None:
        return None
    if b is None:
        return a
    if a is None:
        return b if op is Add else Neg(b)
    return op(a, b)
