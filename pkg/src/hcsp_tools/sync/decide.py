"""Deciding whether a branch guard contradicts the accumulated condition.

Three tiers, cheapest first: syntactic lookups, Fourier–Motzkin elimination
over the linear relaxation of the conjunctive facts, then z3 on the exported
SMT-LIB script. A branch is only ever pruned on an ``unsat`` answer.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import sympy
import z3

from ..exceptions import UnsupportedConstructError
from ..symbolic.expr import FALSE, TRUE, BExpr, Cmp, Crossing, Sub, conj, conjuncts, negate
from ..symbolic.simplify import simplify, to_nnf
from ..symbolic.smtlib import build_script
from ..symbolic.sympy_bridge import SymbolTable, to_sympy

logger = logging.getLogger(__name__)

Verdict = Literal["conflict", "consistent", "unknown"]
Kind = Literal["eq", "le", "lt"]

MAX_ROWS = 400


@dataclass
class DecisionStats:
    """How many guards each tier settled."""

    syntactic: int = 0
    linear: int = 0
    smt: int = 0
    undecided: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "syntactic": self.syntactic,
            "linear": self.linear,
            "smt": self.smt,
            "undecided": self.undecided,
        }


class GuardDecider:
    """Answers ``facts ∧ guard`` satisfiability questions with caching."""

    def __init__(self, use_z3: bool = True, timeout_ms: int = 5000):
        self.use_z3 = use_z3
        self.timeout_ms = timeout_ms
        self.stats = DecisionStats()
        self._cache: dict[tuple[tuple[BExpr, ...], BExpr], Verdict] = {}

    def decide(self, facts: Sequence[BExpr], guard: BExpr) -> Verdict:
        key = (tuple(facts), simplify(guard))
        if key not in self._cache:
            self._cache[key] = self._decide(*key)
        return self._cache[key]

    def _decide(self, facts: tuple[BExpr, ...], guard: BExpr) -> Verdict:
        if guard == FALSE or FALSE in facts or negate(guard) in facts:
            self.stats.syntactic += 1
            return "conflict"
        if guard == TRUE or guard in facts:
            self.stats.syntactic += 1
            return "consistent"
        if linear_conflict([*facts, guard]):
            self.stats.linear += 1
            return "conflict"
        if self.use_z3:
            verdict = self._smt(facts, guard)
            if verdict != "unknown":
                self.stats.smt += 1
                return verdict
        self.stats.undecided += 1
        return "unknown"

    def _smt(self, facts: tuple[BExpr, ...], guard: BExpr) -> Verdict:
        try:
            script = build_script(negate(guard), conj(*facts))
        except UnsupportedConstructError as e:
            logger.debug(f"Guard not exportable, keeping the branch: {e}")
            return "unknown"
        solver = z3.Solver()
        solver.set("timeout", self.timeout_ms)
        try:
            solver.from_string(script.body())
            result = solver.check()
        except z3.Z3Exception as e:
            logger.warning(f"z3 rejected a pruning query: {e}")
            return "unknown"
        if result == z3.unsat:
            return "conflict"
        if result == z3.sat:
            return "consistent"
        logger.debug(f"z3 returned unknown for guard {guard}")
        return "unknown"


# ============================================================================
# Fourier–Motzkin over the linear relaxation
# ============================================================================


@dataclass
class _Row:
    """``Σ coeffs[k]·k + const  (kind)  0``; ``k`` are monomials taken as opaque."""

    coeffs: dict[sympy.Expr, Fraction]
    const: Fraction
    kind: Kind

    def scaled(self, factor: Fraction) -> _Row:
        return _Row(
            {k: c * factor for k, c in self.coeffs.items()}, self.const * factor, self.kind
        )

    def plus(self, other: _Row) -> _Row:
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs.get(k, Fraction(0)) + c
        kind: Kind = "lt" if "lt" in (self.kind, other.kind) else "le"
        return _Row({k: c for k, c in coeffs.items() if c}, self.const + other.const, kind)

    def violated(self) -> bool:
        """A row without unknowns that does not hold."""
        if self.coeffs:
            return False
        if self.kind == "eq":
            return self.const != 0
        if self.kind == "le":
            return self.const > 0
        return self.const >= 0


@dataclass
class _System:
    table: SymbolTable = field(default_factory=SymbolTable)
    rows: list[_Row] = field(default_factory=list)

    def add(self, b: BExpr) -> None:
        """Add the comparisons among the top-level conjuncts; anything else is dropped."""
        for fact in conjuncts(b):
            for part in conjuncts(to_nnf(_quantifier_free(fact))):
                if isinstance(part, Cmp):
                    row = self._row(part)
                    if row is not None:
                        self.rows.append(row)

    def _row(self, c: Cmp) -> _Row | None:
        try:
            diff = sympy.expand(to_sympy(Sub(c.left, c.right), self.table))
        except UnsupportedConstructError:
            return None
        coeffs: dict[sympy.Expr, Fraction] = {}
        const = Fraction(0)
        for term, coeff in diff.as_coefficients_dict().items():
            if not coeff.is_Rational:
                return None
            value = Fraction(int(coeff.p), int(coeff.q))
            if term == 1:
                const += value
            else:
                coeffs[term] = coeffs.get(term, Fraction(0)) + value
        coeffs = {k: v for k, v in coeffs.items() if v}
        match c.op:
            case "==":
                return _Row(coeffs, const, "eq")
            case "<=":
                return _Row(coeffs, const, "le")
            case "<":
                return _Row(coeffs, const, "lt")
            case ">=":
                return _Row(coeffs, const, "le").scaled(Fraction(-1))
            case ">":
                return _Row(coeffs, const, "lt").scaled(Fraction(-1))
        return None


def _quantifier_free(b: BExpr) -> BExpr:
    if isinstance(b, Crossing):
        return b.necessary()
    return b


def linear_conflict(facts: Sequence[BExpr]) -> bool:
    """True when the linear relaxation of ``facts`` is infeasible.

    Products and powers are treated as independent unknowns, so a conflict
    found here is a conflict of the original constraints.
    """
    system = _System()
    for fact in facts:
        system.add(fact)
    rows = system.rows
    if any(r.violated() for r in rows):
        return True
    rows = _eliminate_equalities(rows)
    if rows is None:
        return True
    return _fourier_motzkin(rows)


def _eliminate_equalities(rows: list[_Row]) -> list[_Row] | None:
    """Solve equalities away; ``None`` when one of them is contradictory."""
    rows = list(rows)
    while True:
        pivot = next((r for r in rows if r.kind == "eq" and r.coeffs), None)
        if pivot is None:
            break
        rows.remove(pivot)
        key, coeff = next(iter(pivot.coeffs.items()))
        rows = [_substitute(r, key, coeff, pivot) for r in rows]
        if any(r.violated() for r in rows):
            return None
    return [r for r in rows if r.kind != "eq"]


def _substitute(row: _Row, key, coeff: Fraction, pivot: _Row) -> _Row:
    """Eliminate ``key`` from ``row`` with the equality ``pivot``."""
    c = row.coeffs.get(key)
    if not c:
        return row
    combined = row.plus(pivot.scaled(-c / coeff))
    combined.kind = row.kind
    combined.coeffs.pop(key, None)
    return combined


def _fourier_motzkin(rows: list[_Row]) -> bool:
    while True:
        if any(r.violated() for r in rows):
            return True
        keys = {k for r in rows for k in r.coeffs}
        if not keys:
            return False

        def cost(k) -> int:
            pos = sum(1 for r in rows if r.coeffs.get(k, 0) > 0)
            neg = sum(1 for r in rows if r.coeffs.get(k, 0) < 0)
            return pos * neg - pos - neg

        key = min(keys, key=lambda k: (cost(k), str(k)))
        upper = [r for r in rows if r.coeffs.get(key, 0) > 0]
        lower = [r for r in rows if r.coeffs.get(key, 0) < 0]
        rest = [r for r in rows if not r.coeffs.get(key, 0)]
        for u in upper:
            for lo in lower:
                combined = u.scaled(1 / u.coeffs[key]).plus(lo.scaled(-1 / lo.coeffs[key]))
                combined.coeffs.pop(key, None)
                rest.append(combined)
        if len(rest) > MAX_ROWS:
            logger.debug(f"Fourier–Motzkin gave up with {len(rest)} rows")
            return False
        rows = rest
