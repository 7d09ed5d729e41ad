"""Checking ``(s0, s, tr) ⊨ P`` for concrete states and traces.

Binder parameters and boundary times are resolved into an environment as the
checker descends, so assertions are never instantiated symbolically here.
Paths are compared with the recorded continuous blocks at sample points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..assertions.assn import (
    Assertion,
    Binder,
    BoolLift,
    Conj,
    Disj,
    FalseAssn,
    Init,
    InSpec,
    Interrupt,
    InterruptInf,
    IOSync,
    OutSpec,
    Rec,
    RecVar,
    Subst,
    SyncResidual,
    TrueAssn,
    Wait,
    WaitIn,
    WaitOutv,
)
from ..assertions.path import PathAssertion, path_state
from ..exceptions import (
    IrrationalCrossingError,
    ResidualAssertionError,
    SatisfactionInconclusiveError,
)
from ..ode.solver import least_crossing
from ..ready import ReadySet
from ..symbolic.evaluate import Env, State, evaluate
from ..symbolic.expr import (
    TIME,
    Atom,
    BExpr,
    Cmp,
    Crossing,
    Expr,
    FreshTime,
    Var,
    conj,
    conjuncts,
    free_atoms,
)
from .trace import CommEvent, ContEvent, Trace, is_deadlocked

logger = logging.getLogger(__name__)

SAMPLES = 5


@dataclass(frozen=True)
class Failure:
    """Where the attempt that got furthest along the run broke down.

    ``trail`` names the disjuncts, loop unfoldings and communication
    branches taken from the top of the assertion.
    """

    consumed: int
    trail: tuple[str, ...]
    reason: str

    def __str__(self) -> str:
        where = " > ".join(self.trail) or "top"
        return f"{where}: {self.reason} (after {self.consumed} events)"


@dataclass(frozen=True)
class Verdict:
    holds: bool
    failure: Failure | None = None


@dataclass
class _Search:
    limit: int
    total: int
    recs: dict[str, Rec] = field(default_factory=dict)
    truncated: bool = False
    trail: list[str] = field(default_factory=list)
    best: Failure | None = None

    def fail(self, tr: Trace, reason: str) -> bool:
        """Record a failed leaf check; the first one that got furthest is kept."""
        consumed = self.total - len(tr)
        if self.best is None or consumed > self.best.consumed:
            self.best = Failure(consumed, tuple(self.trail), reason)
        return False


def satisfies(
    s0: State, s: State, tr: Trace, p: Assertion, *, rec_unfold_slack: int = 4
) -> bool:
    """Whether the concrete triple ``(s0, s, tr)`` satisfies ``p``.

    A trace ending in deadlock satisfies only ``true``. Recursion is unfolded
    at most ``len(tr) + rec_unfold_slack`` times; a negative answer reached
    only by cutting the unfolding raises ``SatisfactionInconclusiveError``.
    """
    return check_run(s0, s, tr, p, rec_unfold_slack=rec_unfold_slack).holds


def check_run(
    s0: State, s: State, tr: Trace, p: Assertion, *, rec_unfold_slack: int = 4
) -> Verdict:
    """``satisfies`` with the closest failure when the answer is no."""
    if is_deadlocked(tr):
        if isinstance(p, TrueAssn):
            return Verdict(True)
        return Verdict(False, Failure(0, (), "the run deadlocks"))
    search = _Search(limit=len(tr) + rec_unfold_slack, total=len(tr))
    if _sat(p, s0, s, tuple(tr), {}, search, 0):
        return Verdict(True)
    if search.truncated:
        raise SatisfactionInconclusiveError(
            f"Recursion bound {search.limit} reached without a verdict"
        )
    return Verdict(False, search.best)


def _into(label: str, p: Assertion, s0, s, tr, env, search: _Search, depth: int) -> bool:
    search.trail.append(label)
    try:
        return _sat(p, s0, s, tr, env, search, depth)
    finally:
        search.trail.pop()


def _differing(s0: State, s: State) -> list[str]:
    names = sorted(set(s0) | set(s))
    return [n for n in names if n not in s0 or n not in s or s0[n] != s[n]]


def _sat(
    p: Assertion, s0: State, s: State, tr: Trace, env: Env, search: _Search, depth: int
) -> bool:
    match p:
        case TrueAssn():
            return True
        case FalseAssn():
            return search.fail(tr, "false")
        case Init():
            if tr:
                return search.fail(tr, f"{len(tr)} events remain after termination")
            if s != s0:
                names = ", ".join(_differing(s0, s))
                return search.fail(tr, f"final value of {names} differs")
            return True
        case Conj(left, right):
            return _into("left conjunct", left, s0, s, tr, env, search, depth) and _into(
                "right conjunct", right, s0, s, tr, env, search, depth
            )
        case Disj(left, right):
            return _into("left disjunct", left, s0, s, tr, env, search, depth) or _into(
                "right disjunct", right, s0, s, tr, env, search, depth
            )
        case BoolLift(cond, body):
            scope = bind_boundaries(cond, s0, env)
            if not evaluate(_resolved(cond), s0, scope):
                return search.fail(tr, f"guard {cond} is false")
            return _sat(body, s0, s, tr, scope, search, depth)
        case Subst(body, _):
            values = {x: evaluate(e, s0, env) for x, e in p.pairs}
            return _sat(body, s0.update_many(values), s, tr, env, search, depth)
        case IOSync(ch, value, body):
            expected = CommEvent(ch, None, evaluate(value, s0, env))
            if not tr or tr[0] != expected:
                return search.fail(tr, f"expected {ch} carrying {expected.value}")
            return _sat(body, s0, s, tr[1:], env, search, depth)
        case WaitIn(path, ch, body):
            spec = InSpec(ch, body)
            return _sat_comms(path, (spec,), None, None, s0, s, tr, env, search, depth)
        case WaitOutv(path, ch, value, body):
            v = evaluate(value, s0, env)
            return _sat_outv(path, ch, v, body, s0, s, tr, env, search, depth)
        case Wait(path, delay, body):
            d = evaluate(delay, s0, env)
            return _sat_tail(path, d, body, frozenset(), s0, s, tr, env, search, depth)
        case Interrupt(path, delay, tail, comms):
            d = evaluate(delay, s0, env)
            return _sat_comms(path, comms, d, tail, s0, s, tr, env, search, depth)
        case InterruptInf(path, comms):
            return _sat_comms(path, comms, None, None, s0, s, tr, env, search, depth)
        case Rec(name, base, step):
            search.recs[name] = p
            # A recursion body is closed; outer binders do not reach inside.
            return _into(f"{name} exit", base, s0, s, tr, {}, search, depth) or _into(
                f"{name} iteration", step, s0, s, tr, {}, search, depth
            )
        case RecVar(name):
            rec = search.recs.get(name)
            if rec is None:
                raise ResidualAssertionError(f"Unbound recursion variable {name}")
            if depth >= search.limit:
                search.truncated = True
                return False
            depth += 1
            return _into(f"{name} exit", rec.base, s0, s, tr, {}, search, depth) or _into(
                f"{name} iteration", rec.step, s0, s, tr, {}, search, depth
            )
        case SyncResidual():
            raise ResidualAssertionError(f"Assertion is not fully synchronized: {p}")
    raise TypeError(f"not an assertion: {p!r}")


# ============================================================================
# Boundary times
# ============================================================================


def _definition(b: BExpr) -> tuple[FreshTime, Expr | BExpr] | None:
    match b:
        case Cmp("==", FreshTime() as t, rhs):
            return t, rhs
        case Cmp("==", lhs, FreshTime() as t):
            return t, lhs
        case Crossing(var, _):
            return var, b
    return None


def bind_boundaries(cond: BExpr, s0: State, env: Env) -> dict[Atom, Fraction]:
    """Extend ``env`` with the boundary times that ``cond`` defines.

    ``t1 = e`` binds ``t1`` once every atom of ``e`` is known; ``exit(t1, B)``
    binds it to the least crossing of ``B`` from ``s0``.
    """
    scope: dict[Atom, Fraction] = dict(env)
    pending = [d for d in map(_definition, conjuncts(cond)) if d is not None]
    progress = True
    while pending and progress:
        progress = False
        for var, rhs in list(pending):
            pending.remove((var, rhs))
            if isinstance(rhs, Crossing):
                needed = free_atoms(rhs.along) - {TIME}
            else:
                needed = free_atoms(rhs)
            if any(not isinstance(a, Var) and a not in scope for a in needed):
                pending.append((var, rhs))
                continue
            if isinstance(rhs, Crossing):
                try:
                    crossing = least_crossing(rhs.along, s0, scope)
                except IrrationalCrossingError as e:
                    raise SatisfactionInconclusiveError(f"{var.name}: {e}") from e
                if crossing is None:
                    raise SatisfactionInconclusiveError(
                        f"{var.name} is defined by a domain that is never left"
                    )
                scope[var] = crossing
            else:
                scope[var] = evaluate(rhs, s0, scope)
            progress = True
    return scope


def _resolved(cond: BExpr) -> BExpr:
    """``cond`` with its crossing definitions dropped; they hold once bound."""
    return conj(*(c for c in conjuncts(cond) if not isinstance(c, Crossing)))


# ============================================================================
# Waiting blocks
# ============================================================================


def _matches_path(
    event: ContEvent, path: PathAssertion, ready: ReadySet, s0: State, env: Env
) -> bool:
    if event.rdy != ready:
        return False
    for k in range(1, SAMPLES + 1):
        tau = event.duration * k / SAMPLES
        expected = path_state(path, s0, tau, env)
        actual = event.state_at(tau)
        for name, value in actual.items():
            if name in expected and expected[name] != value:
                return False
    return True


def _with(binder: Binder, env: Env, *args: Fraction) -> dict[Atom, Fraction]:
    scope: dict[Atom, Fraction] = dict(env)
    scope.update(zip(binder.params, args, strict=True))
    return scope


def _describe(tr: Trace) -> str:
    if not tr:
        return "the end of the trace"
    match tr[0]:
        case CommEvent(ch, direction, value):
            return f"{ch}{direction or ''} carrying {value}"
        case ContEvent(duration):
            return f"a block of {duration} time units"
    return str(tr[0])


def _sat_tail(path, d, body: Binder, ready, s0, s, tr, env, search, depth) -> bool:
    if d <= 0:
        return _sat(body.body, s0, s, tr, _with(body, env, Fraction(0)), search, depth)
    if not tr or not isinstance(tr[0], ContEvent) or tr[0].duration != d:
        return search.fail(tr, f"expected a block of {d} time units, got {_describe(tr)}")
    if not _matches_path(tr[0], path, ready, s0, env):
        return search.fail(tr, "the block leaves the path or its ready set differs")
    return _sat(body.body, s0, s, tr[1:], _with(body, env, d), search, depth)


def _sat_outv(path, ch, value, body: Binder, s0, s, tr, env, search, depth) -> bool:
    head = CommEvent(ch, "!", value)
    if tr and tr[0] == head:
        return _sat(body.body, s0, s, tr[1:], _with(body, env, Fraction(0)), search, depth)
    if len(tr) < 2 or not isinstance(tr[0], ContEvent) or tr[1] != head:
        return search.fail(tr, f"expected {ch}! carrying {value}, got {_describe(tr)}")
    if not _matches_path(tr[0], path, frozenset({(ch, "!")}), s0, env):
        return search.fail(tr, "the block leaves the path or its ready set differs")
    d = tr[0].duration
    return _sat(body.body, s0, s, tr[2:], _with(body, env, d), search, depth)


def _comm_continues(spec, d: Fraction, s0, s, tr, env, search, depth) -> bool:
    """Whether the branch ``spec`` takes ``tr[0]`` after ``d`` and the rest fits its body."""
    search.trail.append(f"{spec.ch}{spec.direction} branch")
    try:
        event = tr[0]
        if (
            not isinstance(event, CommEvent)
            or event.ch != spec.ch
            or event.direction != spec.direction
        ):
            return search.fail(tr, f"the branch cannot take {_describe(tr)}")
        if isinstance(spec, InSpec):
            scope = _with(spec.body, env, d, event.value)
        else:
            assert isinstance(spec, OutSpec)
            value_scope = dict(env)
            value_scope.update(zip(spec.value.params, (d,), strict=True))
            expected = evaluate(spec.value.expr, s0, value_scope)
            if expected != event.value:
                return search.fail(tr, f"expected {spec.ch}! carrying {expected}")
            scope = _with(spec.body, env, d)
        return _sat(spec.body.body, s0, s, tr[1:], scope, search, depth)
    finally:
        search.trail.pop()


def _sat_comms(
    path, comms, limit: Fraction | None, tail: Binder | None, s0, s, tr, env, search, depth
) -> bool:
    """Interrupt-shaped blocks; ``limit`` ``None`` means no time bound and no tail."""
    ready = frozenset((c.ch, c.direction) for c in comms)
    if tail is not None and limit is not None:
        search.trail.append("timeout")
        try:
            if _sat_tail(path, limit, tail, ready, s0, s, tr, env, search, depth):
                return True
        finally:
            search.trail.pop()
    if not tr:
        return search.fail(tr, "the trace ends while waiting to communicate")
    zero = Fraction(0)
    for spec in comms:
        if _comm_continues(spec, zero, s0, s, tr, env, search, depth):
            return True
    if len(tr) < 2 or not isinstance(tr[0], ContEvent):
        return False
    d = tr[0].duration
    if limit is not None and d > limit:
        return search.fail(tr, f"the block outlasts the time bound {limit}")
    if not _matches_path(tr[0], path, ready, s0, env):
        return search.fail(tr, "the block leaves the path or its ready set differs")
    return any(_comm_continues(spec, d, s0, s, tr[1:], env, search, depth) for spec in comms)
