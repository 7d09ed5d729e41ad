"""Closed-form solutions of linear ODE systems and their exit times.

The supported class is ``ẋ = A·x + b`` with constant coefficients (entries
may mention variables that the system does not evolve) whose augmented
matrix ``[[A, b], [0, 0]]`` is nilpotent. The matrix exponential is then a
finite sum and every solution component is a polynomial in the path time.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from ..exceptions import IrrationalCrossingError, UnsupportedODEError
from ..symbolic.evaluate import Env, State, evaluate
from ..symbolic.expr import (
    FALSE,
    TIME,
    TRUE,
    BExpr,
    Cmp,
    Const,
    Crossing,
    Div,
    Expr,
    FreshTime,
    Neg,
    Sub,
    Var,
    comparisons,
    eq,
    iter_atoms,
    program_vars,
    substitute_many,
)
from ..symbolic.simplify import linear_in, simplify
from ..symbolic.sympy_bridge import SymbolTable, from_sympy, to_sympy

logger = logging.getLogger(__name__)

Equations = tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class ODESolution:
    """A solved system with its boundary.

    ``solution`` maps each evolved variable to a polynomial over the start
    state and ``TIME``. ``boundary`` is ``None`` when the domain is ``true``
    and the evolution never ends on its own; otherwise it is the exit time,
    either an explicit expression over the start state or the fresh time
    ``fresh`` characterized by ``constraint``.
    """

    eqs: Equations
    domain: BExpr
    solution: dict[str, Expr]
    boundary: Expr | None = None
    fresh: FreshTime | None = None
    constraint: BExpr = TRUE
    lipschitz_ok: bool = True
    witness: str = ""
    along: BExpr = field(default=TRUE)

    @property
    def infinite(self) -> bool:
        return self.boundary is None

    def at(self, time: Expr) -> dict[str, Expr]:
        """The solution map with ``TIME`` instantiated."""
        return {x: simplify(substitute_many(e, {TIME: time})) for x, e in self.solution.items()}


# ============================================================================
# Linear class
# ============================================================================


def _linear_system(eqs: Equations, table: SymbolTable):
    """``(A, b)`` as sympy matrices, or ``None`` outside the linear class."""
    names = [x for x, _ in eqs]
    symbols = [table.symbol(Var(x)) for x in names]
    rows, consts = [], []
    for _, rhs in eqs:
        expr = sympy.expand(to_sympy(rhs, table))
        try:
            poly = sympy.Poly(expr, *symbols)
        except sympy.PolynomialError:
            return None
        if poly.total_degree() > 1:
            return None
        row = [poly.coeff_monomial(sym) for sym in symbols]
        if any(coeff.free_symbols & set(symbols) for coeff in row):
            return None
        rows.append(row)
        consts.append(poly.coeff_monomial(1))
    return sympy.Matrix(rows), sympy.Matrix(consts)


def check_lipschitz(eqs: Equations) -> bool:
    """True for the linear constant-coefficient class, which is globally Lipschitz."""
    return _linear_system(eqs, SymbolTable()) is not None


def _augmented(a: sympy.Matrix, b: sympy.Matrix) -> sympy.Matrix:
    n = a.rows
    m = sympy.zeros(n + 1, n + 1)
    m[:n, :n] = a
    m[:n, n] = b
    return m


def _is_nilpotent(m: sympy.Matrix) -> bool:
    power = m ** m.rows
    return all(sympy.simplify(entry) == 0 for entry in power)


def solve_polynomial(eqs: Equations) -> dict[str, Expr]:
    """The solution map ``x ↦ p(s0, t)`` of a supported system."""
    names = [x for x, _ in eqs]
    table = SymbolTable()
    system = _linear_system(eqs, table)
    if system is None:
        raise UnsupportedODEError(
            names, f"Not a linear constant-coefficient system over {', '.join(names)}"
        )
    m = _augmented(*system)
    if not _is_nilpotent(m):
        raise UnsupportedODEError(
            names, f"Solution over {', '.join(names)} is not polynomial in time"
        )

    t = table.time
    exp_mt = sympy.zeros(m.rows, m.rows)
    term = sympy.eye(m.rows)
    for k in range(m.rows):
        exp_mt += term * t**k / sympy.factorial(k)
        term = term * m
    start = sympy.Matrix([table.symbol(Var(x)) for x in names] + [1])
    values = exp_mt * start
    return {x: from_sympy(values[i], table, order_by=TIME) for i, x in enumerate(names)}


# ============================================================================
# Boundary
# ============================================================================


def along_solution(solution: Mapping[str, Expr], domain: BExpr) -> BExpr:
    """The domain read along the solution: a condition on the start state and ``TIME``."""
    return simplify(substitute_many(domain, {Var(x): e for x, e in solution.items()}))


def _explicit_exit(along: BExpr) -> Expr | None:
    """Closed-form exit time when ``along`` is one comparison moving linearly to its boundary."""
    if not isinstance(along, Cmp) or along.op == "==":
        return None
    parts = linear_in(simplify(Sub(along.left, along.right)), TIME)
    if parts is None:
        return None
    c0, c1 = parts
    if not isinstance(c1, Const) or c1.value == 0:
        return None
    growing = c1.value > 0
    if growing != (along.op in ("<", "<=")):
        return None
    if c1.value == 1:
        return simplify(Neg(c0))
    if c1.value == -1:
        return simplify(c0)
    return simplify(Div(Neg(c0), c1))


def boundary_condition(
    solution: Mapping[str, Expr], domain: BExpr, fresh: FreshTime
) -> tuple[FreshTime, BExpr]:
    """Constraint characterizing ``fresh`` as the exit time from ``domain``.

    A single comparison that the solution approaches linearly gives the
    explicit form ``t1 = e``; anything else gives ``exit(t1, along)``.
    """
    along = along_solution(solution, domain)
    if along == FALSE:
        return fresh, eq(fresh, 0)
    explicit = _explicit_exit(along)
    if explicit is not None:
        return fresh, eq(fresh, explicit)
    return fresh, Crossing(fresh, along)


def solve(
    eqs: Equations, domain: BExpr, fresh: Callable[[], FreshTime] | None = None
) -> ODESolution:
    """Solve ``eqs`` and compute the exit time from ``domain``."""
    solution = solve_polynomial(eqs)
    names = ", ".join(x for x, _ in eqs)
    witness = f"linear constant-coefficient system over {names}"
    domain = simplify(domain)
    along = along_solution(solution, domain)
    if domain == TRUE:
        logger.debug(f"Solved ODE over {names}; unbounded domain")
        return ODESolution(eqs, domain, solution, witness=witness, along=along)
    if fresh is None:
        raise ValueError("a fresh time supply is needed for a bounded domain")
    var, constraint = boundary_condition(solution, domain, fresh())
    logger.debug(f"Solved ODE over {names}; boundary {constraint}")
    return ODESolution(
        eqs,
        domain,
        solution,
        boundary=var,
        fresh=var,
        constraint=constraint,
        witness=witness,
        along=along,
    )


# ============================================================================
# Concrete exit times
# ============================================================================


def least_crossing(along: BExpr, s0: State, env: Env | None = None) -> Fraction | None:
    """Least ``d ≥ 0`` at which ``along`` fails, for a concrete start state.

    Returns ``None`` when ``along`` holds for all time. Concrete runs are
    exact, so an irrational crossing raises ``IrrationalCrossingError``.
    """
    scope = dict(env or {})
    concrete = {}
    for atom in set(iter_atoms(along)) - {TIME}:
        concrete[atom] = Const(evaluate(atom, s0, scope))
    closed = simplify(substitute_many(along, concrete))

    def holds(t: Fraction) -> bool:
        return bool(evaluate(closed, s0, {TIME: t}))

    if not holds(Fraction(0)):
        return Fraction(0)

    table = SymbolTable()
    t = table.time
    roots: set = set()
    for cmp in comparisons(closed):
        poly = sympy.Poly(sympy.expand(to_sympy(Sub(cmp.left, cmp.right), table)), t)
        if poly.is_zero or poly.degree() == 0:
            continue
        roots.update(r for r in sympy.real_roots(poly) if r > 0)

    previous = Fraction(0)
    for root in sorted(roots):
        if not root.is_Rational:
            raise IrrationalCrossingError(sorted(program_vars(along)), float(root))
        point = Fraction(int(root.p), int(root.q))
        if not holds((previous + point) / 2):
            return previous
        if not holds(point):
            return point
        previous = point
    if not holds(previous + 1):
        return previous
    return None
