"""Conversion between our expressions and sympy."""

from __future__ import annotations

from fractions import Fraction

import sympy

from ..exceptions import UnsupportedConstructError
from .expr import (
    TIME,
    Add,
    Atom,
    Bound,
    Const,
    Div,
    Expr,
    FreshTime,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
)
from .simplify import simplify


class SymbolTable:
    """Two-way map between atoms and sympy symbols."""

    def __init__(self):
        self._to: dict[Atom, sympy.Symbol] = {}
        self._from: dict[sympy.Symbol, Atom] = {}

    def symbol(self, atom: Atom) -> sympy.Symbol:
        if atom not in self._to:
            if isinstance(atom, Var):
                name = atom.name
            elif isinstance(atom, FreshTime):
                name = f"{atom.name}__fresh"
            elif atom == TIME:
                name = "t__time"
            else:
                name = f"{atom.name}__{atom.uid}"
            sym = sympy.Symbol(name, real=True)
            self._to[atom] = sym
            self._from[sym] = atom
        return self._to[atom]

    def atom(self, sym: sympy.Symbol) -> Atom:
        try:
            return self._from[sym]
        except KeyError:
            raise UnsupportedConstructError(sym, f"Unknown sympy symbol: {sym}") from None

    @property
    def time(self) -> sympy.Symbol:
        return self.symbol(TIME)


def to_sympy(e: Expr, table: SymbolTable) -> sympy.Expr:
    match e:
        case Const(value):
            return sympy.Rational(value.numerator, value.denominator)
        case Var() | Bound() | FreshTime():
            return table.symbol(e)
        case Neg(arg):
            return -to_sympy(arg, table)
        case Add(l, r):
            return to_sympy(l, table) + to_sympy(r, table)
        case Sub(l, r):
            return to_sympy(l, table) - to_sympy(r, table)
        case Mul(l, r):
            return to_sympy(l, table) * to_sympy(r, table)
        case Div(l, r):
            return to_sympy(l, table) / to_sympy(r, table)
        case Pow(base, n):
            return to_sympy(base, table) ** n
    raise UnsupportedConstructError(e)


def from_sympy(expr: sympy.Expr, table: SymbolTable, order_by: Atom | None = None) -> Expr:
    """Convert back, simplified.

    With ``order_by`` the result is a polynomial in that atom, written with
    ascending powers: ``p + v * t + 1/2 * a * t ^ 2``.
    """
    if order_by is not None:
        sym = table.symbol(order_by)
        poly = sympy.Poly(sympy.expand(expr), sym)
        result: Expr = Const(0)
        for (power,), coeff in sorted(poly.terms()):
            term = _convert(coeff, table)
            if power:
                term = Mul(term, Pow(order_by, power))
            result = Add(result, term)
        return simplify(result)
    return simplify(_convert(expr, table))


def _convert(expr: sympy.Expr, table: SymbolTable) -> Expr:
    if expr.is_Rational:
        return Const(Fraction(int(expr.p), int(expr.q)))
    if expr.is_Symbol:
        return table.atom(expr)
    if expr.is_Add:
        result: Expr | None = None
        for term in expr.as_ordered_terms():
            converted = _convert(term, table)
            result = converted if result is None else Add(result, converted)
        assert result is not None
        return result
    if expr.is_Mul:
        coeff, factors = expr.as_coeff_mul()
        result = _convert(coeff, table)
        for factor in factors:
            result = Mul(result, _convert(factor, table))
        return result
    if expr.is_Pow and expr.exp.is_Integer:
        return Pow(_convert(expr.base, table), int(expr.exp))
    raise UnsupportedConstructError(expr, f"Not a rational expression: {expr}")
