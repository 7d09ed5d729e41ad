"""Expression printers.

Two registers share one precedence table:

- ``math``: spaced, with ``=``, ``∧``, ``∨``, ``¬``, ``→``; used in assertions.
- ``code``: compact arithmetic with ``==``, ``&&``, ``||``, ``!``, ``->``; this is
  the concrete syntax read back by the parser.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from typing import Literal

from .expr import (
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
)

Style = Literal["math", "code"]
Names = Mapping[Bound, str]

ATOM = 5
_ARITH = {Add: ("+", 1), Sub: ("-", 1), Mul: ("*", 2), Div: ("/", 2)}


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def expr_precedence(e: Expr) -> int:
    match e:
        case Const(value):
            if value.denominator != 1:
                return 2
            return ATOM if value >= 0 else 3
        case Var() | Bound() | FreshTime():
            return ATOM
        case Neg():
            return 3
        case Pow():
            return 4
    return _ARITH[type(e)][1]


def pretty_expr(e: Expr, style: Style = "math", names: Names | None = None) -> str:
    """Render an arithmetic expression."""
    match e:
        case Const(value):
            return format_fraction(value)
        case Var(name):
            return name
        case Bound(name):
            return names.get(e, name) if names else name
        case FreshTime():
            return e.name
        case Neg(arg):
            inner = pretty_expr(arg, style, names)
            if isinstance(arg, Const | Neg) or expr_precedence(arg) < 3:
                inner = f"({inner})"
            return f"-{inner}"
        case Pow(base, n):
            inner = pretty_expr(base, style, names)
            if expr_precedence(base) != ATOM:
                inner = f"({inner})"
            return f"{inner}^{n}" if style == "code" else f"{inner} ^ {n}"

    op, prec = _ARITH[type(e)]
    left = pretty_expr(e.left, style, names)
    right = pretty_expr(e.right, style, names)
    if expr_precedence(e.left) < prec or _shields_literal_division(e):
        left = f"({left})"
    if expr_precedence(e.right) <= prec:
        right = f"({right})"
    return f"{left}{op}{right}" if style == "code" else f"{left} {op} {right}"


def _shields_literal_division(e: Expr) -> bool:
    """``Div(Const, positive integer)`` must not print as a rational literal."""
    return (
        isinstance(e, Div)
        and isinstance(e.left, Const)
        and isinstance(e.right, Const)
        and e.right.value.denominator == 1
        and e.right.value > 0
    )


_MATH_OPS = {"==": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}
_BOOL_SYMBOLS = {
    "math": {And: " ∧ ", Or: " ∨ ", Implies: " → ", Not: "¬"},
    "code": {And: " && ", Or: " || ", Implies: " -> ", Not: "!"},
}


def bexpr_precedence(b: BExpr) -> int:
    match b:
        case Exists():
            return 0
        case Implies():
            return 1
        case Or():
            return 2
        case And():
            return 3
        case Not():
            return 4
    return ATOM


def pretty_bexpr(b: BExpr, style: Style = "math", names: Names | None = None) -> str:
    """Render a boolean expression."""
    symbols = _BOOL_SYMBOLS[style]
    match b:
        case BConst(value):
            return "true" if value else "false"
        case Cmp(op, l, r):
            left, right = pretty_expr(l, style, names), pretty_expr(r, style, names)
            if style == "code":
                return f"{left}{op}{right}"
            return f"{left} {_MATH_OPS[op]} {right}"
        case Not(arg):
            inner = pretty_bexpr(arg, style, names)
            if style == "code":
                wrap = bexpr_precedence(arg) < 4
            else:
                wrap = not isinstance(arg, BConst | Not | Crossing)
            return f"{symbols[Not]}({inner})" if wrap else f"{symbols[Not]}{inner}"
        case Exists(var, body):
            label = names.get(var, var.name) if names else var.name
            return f"∃{label}. {pretty_bexpr(body, style, names)}"
        case Crossing(var, along):
            return f"exit({var.name}, {pretty_bexpr(along, style, names)})"
        case And() | Or():
            prec = bexpr_precedence(b)
            left = pretty_bexpr(b.left, style, names)
            right = pretty_bexpr(b.right, style, names)
            if bexpr_precedence(b.left) < prec:
                left = f"({left})"
            if bexpr_precedence(b.right) <= prec:
                right = f"({right})"
            return f"{left}{symbols[type(b)]}{right}"
        case Implies(l, r):
            left = pretty_bexpr(l, style, names)
            right = pretty_bexpr(r, style, names)
            if bexpr_precedence(l) <= 1:
                left = f"({left})"
            if bexpr_precedence(r) < 1:
                right = f"({right})"
            return f"{left}{symbols[Implies]}{right}"
    raise TypeError(f"not a boolean expression: {b!r}")


def pretty(node, style: Style = "math", names: Names | None = None) -> str:
    if isinstance(node, Expr):
        return pretty_expr(node, style, names)
    return pretty_bexpr(node, style, names)
