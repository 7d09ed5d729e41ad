"""Big-step execution of HCSP processes.

``run`` is a generator: it yields a request whenever the semantics leaves a
choice open (an internal choice, another loop iteration, when and how a
communication happens) and resumes with the answer. ``execute`` answers from
a ``Schedule``; the oracle answers from a co-simulation so that both sides
of a parallel composition agree on timing.
"""

from __future__ import annotations

import logging
from collections.abc import Generator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..exceptions import DeadlockError, DivergenceError, InvalidProcessError
from ..lang.analysis import free_vars
from ..lang.ast import (
    ODE,
    Assign,
    CommBranch,
    Cond,
    IChoice,
    Input,
    Interrupt,
    Output,
    Parallel,
    Process,
    Repeat,
    Seq,
    Skip,
    Wait,
    is_sequential,
)
from ..ode.solver import along_solution, least_crossing, solve_polynomial
from ..ready import rdy
from ..symbolic.evaluate import State, evaluate
from ..symbolic.expr import TIME, BExpr, Expr
from .schedule import (
    Branch,
    ChooseBranch,
    ChooseIterate,
    Choice,
    Comm,
    Iterate,
    Offer,
    OfferComm,
    Request,
    Responder,
    Schedule,
)
from .sync import sync_traces
from .trace import CommEvent, ContEvent, Event, Trace, constant_path, is_deadlocked, solution_path

logger = logging.getLogger(__name__)

Run = Generator[Request, Choice, tuple[State, Trace]]


@lru_cache(maxsize=256)
def _solution(eqs: tuple[tuple[str, Expr], ...]) -> dict[str, Expr]:
    return solve_polynomial(eqs)


@lru_cache(maxsize=256)
def _along(eqs: tuple[tuple[str, Expr], ...], domain: BExpr) -> BExpr:
    return along_solution(_solution(eqs), domain)


def _state_at(s: State, solution: dict[str, Expr], d: Fraction) -> State:
    return s.update_many({x: evaluate(e, s, {TIME: d}) for x, e in solution.items()})


def _exit_time(eqs, domain: BExpr, s: State) -> Fraction | None:
    return least_crossing(_along(eqs, domain), s)


def run(p: Process, s: State, trace: list[Event] | None = None) -> Run:
    """Execute sequential ``p`` from ``s``; returns ``(final state, trace)``.

    Events are appended to ``trace`` as they happen when a list is passed.
    """
    if trace is None:
        trace = []
    s = yield from _run(p, s, trace)
    return s, tuple(trace)


def _run(p: Process, s: State, trace: list[Event]) -> Generator[Request, Choice, State]:
    match p:
        case Skip():
            return s
        case Assign(var, expr):
            return s.update(var, evaluate(expr, s))
        case Input(ch, var):
            offer = Offer(ch, "?")
            choice = yield OfferComm((offer,), None, rdy((offer,)))
            assert isinstance(choice, Comm)
            _wait_const(s, choice.delay, rdy((offer,)), trace)
            trace.append(CommEvent(ch, "?", choice.value))
            return s.update(var, choice.value)
        case Output(ch, expr):
            value = evaluate(expr, s)
            offer = Offer(ch, "!", lambda _d: value)
            choice = yield OfferComm((offer,), None, rdy((offer,)))
            assert isinstance(choice, Comm)
            _wait_const(s, choice.delay, rdy((offer,)), trace)
            trace.append(CommEvent(ch, "!", value))
            return s
        case Seq(first, second):
            s = yield from _run(first, s, trace)
            return (yield from _run(second, s, trace))
        case IChoice(left, right):
            choice = yield ChooseBranch()
            assert isinstance(choice, Branch)
            return (yield from _run(left if choice.index == 0 else right, s, trace))
        case Repeat(body):
            while True:
                choice = yield ChooseIterate()
                assert isinstance(choice, Iterate)
                if not choice.again:
                    return s
                s = yield from _run(body, s, trace)
        case Cond(cond, then, else_):
            return (yield from _run(then if evaluate(cond, s) else else_, s, trace))
        case Wait(delay):
            d = evaluate(delay, s)
            if d > 0:
                trace.append(ContEvent(d, constant_path(s)))
            return s
        case ODE(eqs, domain):
            d = _exit_time(eqs, domain, s)
            if d is None:
                raise DivergenceError(f"Evolution {p} never leaves its domain from {s!r}")
            solution = _solution(eqs)
            if d > 0:
                trace.append(ContEvent(d, solution_path(s, solution)))
            return _state_at(s, solution, d)
        case Interrupt(eqs, domain, tail, branches):
            return (yield from _run_interrupt(eqs, domain, tail, branches, s, trace))
        case Parallel():
            raise InvalidProcessError("run executes sequential processes; use execute_parallel")
    raise TypeError(f"not a process: {p!r}")


def _wait_const(s: State, delay: Fraction, ready, trace: list[Event]) -> None:
    if delay > 0:
        trace.append(ContEvent(delay, constant_path(s), ready))


def _run_interrupt(
    eqs,
    domain: BExpr,
    tail: Process,
    branches: tuple[CommBranch, ...],
    s: State,
    trace: list[Event],
) -> Generator[Request, Choice, State]:
    solution = _solution(eqs)
    limit = _exit_time(eqs, domain, s)

    def value_at(expr: Expr):
        return lambda d: evaluate(expr, _state_at(s, solution, d))

    offers = tuple(
        Offer(b.ch, b.direction, value_at(b.expr) if b.direction == "!" else None)
        for b in branches
    )
    ready = rdy(offers)
    choice = yield OfferComm(offers, limit, ready)
    assert isinstance(choice, Comm)

    if choice.index is None:
        assert limit is not None
        if limit > 0:
            trace.append(ContEvent(limit, solution_path(s, solution), ready))
        logger.debug(f"Interrupt timed out after {limit}")
        return (yield from _run(tail, _state_at(s, solution, limit), trace))

    d = choice.delay
    if d > 0:
        trace.append(ContEvent(d, solution_path(s, solution), ready))
    s_d = _state_at(s, solution, d)
    branch = branches[choice.index]
    if branch.direction == "?":
        trace.append(CommEvent(branch.ch, "?", choice.value))
        s_d = s_d.update(branch.var, choice.value)
    else:
        trace.append(CommEvent(branch.ch, "!", evaluate(branch.expr, s_d)))
    return (yield from _run(branch.cont, s_d, trace))


# ============================================================================
# Drivers
# ============================================================================


def drive(p: Process, s: State, responder: Responder) -> tuple[State, Trace]:
    """Run ``p`` answering every request with ``responder``."""
    gen = run(p, s)
    try:
        request = next(gen)
        while True:
            request = gen.send(responder(request))
    except StopIteration as stop:
        return stop.value


def execute(c: Process, s: State, sched: Schedule) -> tuple[State, Trace]:
    """The big-step relation instance selected by ``sched``."""
    if not is_sequential(c):
        raise InvalidProcessError("execute runs sequential processes; use execute_parallel")
    return drive(c, s, sched.answer)


@dataclass
class ParallelSchedule:
    """Schedules for both sides of ``pc1 ||[cs] pc2`` and which synchronization to keep."""

    left: Schedule | ParallelSchedule
    right: Schedule | ParallelSchedule
    pick: int = 0


def _split_state(p: Parallel, s: State) -> tuple[State, State, State]:
    left_vars, right_vars = free_vars(p.left), free_vars(p.right)
    shared = left_vars & right_vars
    if shared:
        raise InvalidProcessError(
            f"Parallel components share variables: {', '.join(sorted(shared))}"
        )
    rest = State({k: v for k, v in s.items() if k not in left_vars | right_vars})
    return s.restrict(left_vars), s.restrict(right_vars), rest


def execute_parallel_all(
    pc: Process, s: State, sched: Schedule | ParallelSchedule
) -> list[tuple[State, Trace]]:
    """Every ``(state, trace)`` the parallel rule derives from the component runs."""
    if not isinstance(pc, Parallel):
        if not isinstance(sched, Schedule):
            raise InvalidProcessError("A sequential component needs a flat schedule")
        return [execute(pc, s, sched)]
    if not isinstance(sched, ParallelSchedule):
        raise InvalidProcessError("A parallel composition needs a parallel schedule")

    s1, s2, rest = _split_state(pc, s)
    results = []
    for final1, tr1 in execute_parallel_all(pc.left, s1, sched.left):
        for final2, tr2 in execute_parallel_all(pc.right, s2, sched.right):
            merged = final1.merge(final2).merge(rest)
            for tr in sync_traces(tr1, pc.chans, tr2):
                results.append((merged, tr))
    results.sort(key=lambda item: (is_deadlocked(item[1]), repr(item[1])))
    return results


def execute_parallel(
    pc: Process, s: State, sched: Schedule | ParallelSchedule
) -> tuple[State, Trace]:
    """One synchronized run; ``sched.pick`` selects among several synchronizations."""
    results = execute_parallel_all(pc, s, sched)
    if not results:
        raise DeadlockError(f"No synchronized trace for {pc}")
    pick = sched.pick if isinstance(sched, ParallelSchedule) else 0
    if not 0 <= pick < len(results):
        raise DeadlockError(f"Synchronization #{pick} does not exist ({len(results)} found)")
    return results[pick]
