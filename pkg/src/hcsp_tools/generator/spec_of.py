"""Strongest trace assertions of sequential HCSP processes.

Generation runs in continuation style: the assertion of ``c`` is computed
for ``c; k`` from the already generated assertion of the continuation ``k``,
so a command alone is the special case ``k = skip`` with assertion ``init``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from ..assertions.assn import (
    FALSE_A,
    INIT,
    Assertion,
    BoolLift,
    CommSpec,
    InSpec,
    Interrupt,
    InterruptInf,
    OutSpec,
    Rec,
    RecVar,
    Wait,
    WaitIn,
    WaitOutv,
    bind,
    bind_expr,
    disj_a,
)
from ..assertions.path import ID_INV, sol_path
from ..assertions.rewrite import make_subst, normalize
from ..exceptions import InvalidProcessError
from ..lang.ast import (
    ODE,
    Assign,
    CommBranch,
    Cond,
    IChoice,
    Input,
    Output,
    Parallel,
    Process,
    Repeat,
    Seq,
    Skip,
)
from ..lang.ast import Interrupt as InterruptCmd
from ..lang.ast import Wait as WaitCmd
from ..obligations import Obligation, ObligationLog
from ..ode.solver import ODESolution, solve
from ..symbolic.expr import (
    TIME,
    ZERO,
    And,
    BExpr,
    Const,
    Crossing,
    Exists,
    Expr,
    FreshTime,
    Not,
    Var,
    comparisons,
    denominators,
    eq,
    fresh_bound,
    ge,
    negate,
    substitute,
    substitute_many,
)
from ..symbolic.simplify import simplify

logger = logging.getLogger(__name__)


class NameSupply:
    """Fresh boundary times ``t1, t2, ...`` and recursion names ``R1, R2, ...``.

    Processes verified together share one supply so that their boundary
    times never collide after synchronization.
    """

    def __init__(self) -> None:
        self._times = itertools.count(1)
        self._recs = itertools.count(1)

    def fresh_time(self) -> FreshTime:
        return FreshTime(next(self._times))

    def rec_name(self) -> str:
        return f"R{next(self._recs)}"


@dataclass
class SpecResult:
    """A generated assertion with its side conditions and boundary times."""

    assertion: Assertion
    obligations: list[Obligation] = field(default_factory=list)
    fresh_vars: list[tuple[FreshTime, BExpr]] = field(default_factory=list)


class SpecGenerator:
    """Applies the sequential rules by structural recursion."""

    def __init__(self, names: NameSupply | None = None):
        self.names = names or NameSupply()
        self.obligations = ObligationLog()
        self.fresh_vars: list[tuple[FreshTime, BExpr]] = []

    def generate(self, c: Process) -> SpecResult:
        if isinstance(c, Parallel):
            raise InvalidProcessError("Assertions are generated for sequential processes only")
        assertion = normalize(self.spec(c, INIT))
        logger.debug(f"Generated assertion for {c}: {assertion}")
        return SpecResult(assertion, list(self.obligations), list(self.fresh_vars))

    def spec(self, c: Process, cont: Assertion) -> Assertion:
        """Assertion of ``c; k`` where ``cont`` is the assertion of ``k``."""
        match c:
            case Skip():
                return cont
            case Assign(x, e):
                self._check_division(e, c)
                return make_subst(cont, {x: e})
            case Input(ch, x):
                return WaitIn(ID_INV, ch, bind(("d", "v"), lambda _d, v: make_subst(cont, {x: v})))
            case Output(ch, e):
                self._check_division(e, c)
                return WaitOutv(ID_INV, ch, e, bind(("d",), lambda _d: cont))
            case WaitCmd(e):
                self._check_division(e, c)
                return Wait(ID_INV, e, bind(("d",), lambda _d: cont))
            case Seq(first, second):
                return self.spec(first, self.spec(second, cont))
            case Cond(b, then, else_):
                self._check_division(b, c)
                return disj_a(
                    BoolLift(b, self.spec(then, cont)),
                    BoolLift(negate(b), self.spec(else_, cont)),
                )
            case IChoice(left, right):
                return self.internal_choice(left, right, cont)
            case Repeat(body):
                name, step = self.loop_functional(body)
                return Rec(name, cont, step)
            case ODE(eqs, domain):
                return self._ode(c, eqs, domain, cont)
            case InterruptCmd(eqs, domain, tail, branches):
                return self._interrupt(c, eqs, domain, tail, branches, cont)
            case Parallel():
                raise InvalidProcessError("Parallel composition inside a sequential command")
        raise TypeError(f"not a process: {c!r}")

    # ------------------------------------------------------------------------
    # Compound rules
    # ------------------------------------------------------------------------

    def internal_choice(self, left: Process, right: Process, cont: Assertion) -> Assertion:
        return disj_a(self.spec(left, cont), self.spec(right, cont))

    def loop_functional(self, body: Process) -> tuple[str, Assertion]:
        """The body's assertion with the loop continuation left as a hole."""
        name = self.names.rec_name()
        return name, self.spec(body, RecVar(name))

    def rel_cm(
        self, branches: tuple[CommBranch, ...], cont: Assertion, sol: ODESolution
    ) -> tuple[CommSpec, ...]:
        """Communication specs of interrupt branches along the solution ``sol``."""
        comms: list[CommSpec] = []
        for branch in branches:
            body = self.spec(branch.cont, cont)
            if branch.direction == "?":
                var = branch.var
                assert var is not None
                comms.append(
                    InSpec(
                        branch.ch,
                        bind(
                            ("d", "v"),
                            lambda d, v, body=body, var=var: make_subst(
                                make_subst(body, {var: v}), sol.at(d)
                            ),
                        ),
                    )
                )
            else:
                expr = branch.expr
                assert expr is not None
                self._check_division(expr, branch)
                comms.append(
                    OutSpec(
                        branch.ch,
                        bind_expr(("d",), lambda d, expr=expr: _along(expr, sol, d)),
                        bind(("d",), lambda d, body=body: make_subst(body, sol.at(d))),
                    )
                )
        return tuple(comms)

    # ------------------------------------------------------------------------
    # Continuous evolution
    # ------------------------------------------------------------------------

    def _solve(self, c: Process, eqs, domain: BExpr) -> ODESolution:
        for _, rhs in eqs:
            self._check_division(rhs, c)
        self._check_division(domain, c)
        sol = solve(eqs, domain, self.names.fresh_time)
        if sol.fresh is not None:
            self.fresh_vars.append((sol.fresh, sol.constraint))
            if isinstance(sol.constraint, Crossing):
                self._crossing_obligation(sol.constraint, c)
        return sol

    def _ode(self, c: ODE, eqs, domain: BExpr, cont: Assertion) -> Assertion:
        sol = self._solve(c, eqs, domain)
        if sol.infinite:
            logger.info(f"Evolution {c} has an unbounded domain and never terminates")
            return FALSE_A
        assert sol.boundary is not None
        wait = Wait(
            sol_path(sol.solution),
            sol.boundary,
            bind(("d",), lambda d: make_subst(cont, sol.at(d))),
        )
        return BoolLift(sol.constraint, wait)

    def _interrupt(
        self,
        c: InterruptCmd,
        eqs,
        domain: BExpr,
        tail: Process,
        branches: tuple[CommBranch, ...],
        cont: Assertion,
    ) -> Assertion:
        sol = self._solve(c, eqs, domain)
        comms = self.rel_cm(branches, cont, sol)
        path = sol_path(sol.solution)
        if sol.infinite:
            return InterruptInf(path, comms)
        assert sol.boundary is not None
        after = self.spec(tail, cont)
        interrupt = Interrupt(
            path,
            sol.boundary,
            bind(("d",), lambda d: make_subst(after, sol.at(d))),
            comms,
        )
        return BoolLift(sol.constraint, interrupt)

    # ------------------------------------------------------------------------
    # Side conditions
    # ------------------------------------------------------------------------

    def _check_division(self, node: Expr | BExpr, where) -> None:
        exprs = [node] if isinstance(node, Expr) else _sides(node)
        for e in exprs:
            for den in denominators(e):
                folded = simplify(den)
                if isinstance(folded, Const) and folded.value != 0:
                    continue
                if folded == ZERO:
                    logger.warning(f"Division by zero in {where}")
                self.obligations.add(Not(eq(den, 0)), "division", note=f"in {where}")

    def _crossing_obligation(self, crossing: Crossing, where) -> None:
        t = fresh_bound("t")
        leaves = And(ge(t, 0), Not(substitute(crossing.along, TIME, t)))
        self.obligations.add(
            Exists(t, leaves),
            "least-crossing",
            note=f"the domain of {where} is left from every start state",
        )


def _sides(b: BExpr) -> list[Expr]:
    return [side for cmp in comparisons(b) for side in (cmp.left, cmp.right)]


def _along(expr: Expr, sol: ODESolution, d: Expr) -> Expr:
    """``expr`` evaluated on the solution after ``d`` time units."""
    return simplify(substitute_many(expr, {Var(x): e for x, e in sol.at(d).items()}))


# ============================================================================
# Module-level entry points
# ============================================================================


def generate(c: Process, names: NameSupply | None = None) -> SpecResult:
    """The assertion of sequential ``c`` alone."""
    return SpecGenerator(names).generate(c)


def rel_cm(
    branches: tuple[CommBranch, ...], cont: Assertion, sol: ODESolution
) -> tuple[CommSpec, ...]:
    return SpecGenerator().rel_cm(branches, cont, sol)


def loop_functional(body: Process, names: NameSupply | None = None) -> tuple[str, Assertion]:
    return SpecGenerator(names).loop_functional(body)


def internal_choice(c1: Process, c2: Process, cont: Assertion = INIT) -> Assertion:
    return SpecGenerator().internal_choice(c1, c2, cont)
