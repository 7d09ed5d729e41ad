"""Tests for the interpreter, schedules, trace synchronization and satisfaction."""

import itertools
from fractions import Fraction

import pytest

from hcsp_tools.exceptions import (
    DeadlockError,
    InvalidProcessError,
    IrrationalCrossingError,
    SatisfactionInconclusiveError,
    ScheduleExhaustedError,
    ScheduleMismatchError,
)
from hcsp_tools.assertions.assn import Disj
from hcsp_tools.generator.spec_of import generate
from hcsp_tools.lang.parser import parse
from hcsp_tools.models import trace_from_jsonl, trace_to_jsonl
from hcsp_tools.semantics.interpreter import ParallelSchedule, execute, execute_parallel
from hcsp_tools.semantics.sampling import random_schedule
from hcsp_tools.semantics.satisfaction import check_run, satisfies
from hcsp_tools.semantics.schedule import Branch, Comm, Iterate, Schedule
from hcsp_tools.semantics.sync import sync_traces
from hcsp_tools.semantics.trace import (
    DEADLOCK,
    CommEvent,
    ContEvent,
    total_duration,
)
from hcsp_tools.symbolic.evaluate import State
from hcsp_tools.symbolic.expr import TIME, Add, Const

from .strategies import corpus, random_process, random_state


def const_block(duration, rdy=frozenset(), **values):
    return ContEvent(
        Fraction(duration),
        tuple((name, Const(Fraction(v))) for name, v in values.items()),
        rdy,
    )


class TestExecute:
    """Big-step runs under explicit schedules."""

    def test_evolution_until_boundary(self):
        final, trace = execute(parse("<x_dot = 1 & x < 5>"), State({"x": 0}), Schedule())
        assert final == State({"x": 5})
        assert len(trace) == 1
        assert trace[0].duration == 5
        assert trace[0].state_at(Fraction(2))["x"] == 2

    def test_output_after_waiting(self):
        final, trace = execute(parse("ch!x"), State({"x": 2}), Schedule([Comm(1, 0)]))
        assert final == State({"x": 2})
        assert trace == (
            const_block(1, frozenset({("ch", "!")}), x=2),
            CommEvent("ch", "!", 2),
        )

    def test_input_binds_value(self):
        p = parse("ch?x; x := x + 1")
        final, trace = execute(p, State({"x": 0}), Schedule([Comm(0, 0, 7)]))
        assert final["x"] == 8
        assert trace == (CommEvent("ch", "?", 7),)

    def test_internal_choice(self):
        final, _ = execute(parse("x := 1 $ x := 2"), State({"x": 0}), Schedule([Branch(1)]))
        assert final["x"] == 2

    def test_repetition(self):
        sched = Schedule([Iterate(True), Iterate(True), Iterate(False)])
        final, trace = execute(parse("(x := x + 1; wait 1)*"), State({"x": 0}), sched)
        assert final["x"] == 2
        assert total_duration(trace) == 2

    def test_interrupt_timeout_runs_tail(self):
        p = parse("<x_dot = 1 & x < 3 |> y := x> |> [] (ch?y -> skip)")
        final, trace = execute(p, State({"x": 0, "y": 0}), Schedule([Comm(3)]))
        assert final == State({"x": 3, "y": 3})
        assert trace[0].rdy == frozenset({("ch", "?")})

    def test_interrupt_output_along_solution(self):
        p = parse("<x_dot = 2 & true> |> [] (ch!x + 1 -> skip)")
        final, trace = execute(p, State({"x": 0}), Schedule([Comm(Fraction(3, 2), 0)]))
        assert final["x"] == 3
        assert trace[-1] == CommEvent("ch", "!", 4)

    def test_schedule_exhausted(self):
        with pytest.raises(ScheduleExhaustedError, match="branch"):
            execute(parse("skip $ skip"), State(), Schedule())

    def test_schedule_mismatch(self):
        with pytest.raises(ScheduleMismatchError, match="Expected a branch choice"):
            execute(parse("skip $ skip"), State(), Schedule([Iterate(True)]))

    def test_delay_beyond_limit_rejected(self):
        p = parse("<x_dot = 1 & x < 3> |> [] (ch?y -> skip)")
        with pytest.raises(ScheduleMismatchError, match="exceeds the limit"):
            execute(p, State({"x": 0, "y": 0}), Schedule([Comm(4, 0, 1)]))

    def test_parallel_rejected(self):
        with pytest.raises(InvalidProcessError):
            execute(parse("ch!1 ||[ch] ch?x"), State({"x": 0}), Schedule())

    def test_irrational_exit_time(self):
        p = parse("<x_dot = y, y_dot = 1 & x < 4>")
        with pytest.raises(IrrationalCrossingError):
            execute(p, State({"x": 0, "y": 0}), Schedule())

    def test_quadratic_exit_time(self):
        p = parse("<x_dot = y, y_dot = 1 & x < 2>")
        final, trace = execute(p, State({"x": 0, "y": 0}), Schedule())
        assert final == State({"x": 2, "y": 2})
        assert trace[0].duration == 2


class TestRandomSchedules:
    def test_same_seed_same_run(self):
        p = corpus()[4]
        s0 = State({"y": 0, "z": 0})
        first = random_schedule(p, s0, seed=11, unroll=2)
        second = random_schedule(p, s0, seed=11, unroll=2)
        assert first[0].to_json() == second[0].to_json()
        assert first[1:] == second[1:]

    def test_schedule_replays(self):
        p = corpus()[3]
        s0 = State({"x": 0, "y": 0})
        sched, final, trace = random_schedule(p, s0, seed=5)
        assert execute(p, s0, Schedule.from_json(sched.to_json())) == (final, trace)


class TestParallelExecution:
    def test_handshake(self):
        pc = parse("ch!x ||[ch] ch?y")
        sched = ParallelSchedule(Schedule([Comm(0, 0)]), Schedule([Comm(0, 0, 5)]))
        final, trace = execute_parallel(pc, State({"x": 5, "y": 0}), sched)
        assert final == State({"x": 5, "y": 5})
        assert trace == (CommEvent("ch", None, 5),)

    def test_wrong_value_has_no_synchronization(self):
        pc = parse("ch!x ||[ch] ch?y")
        sched = ParallelSchedule(Schedule([Comm(0, 0)]), Schedule([Comm(0, 0, 4)]))
        with pytest.raises(DeadlockError, match="No synchronized trace"):
            execute_parallel(pc, State({"x": 5, "y": 0}), sched)


class TestSyncTraces:
    """The trace synchronization relation on small cases."""

    def test_matching_communication(self):
        tr1 = (CommEvent("ch", "!", 1),)
        tr2 = (CommEvent("ch", "?", 1),)
        assert sync_traces(tr1, {"ch"}, tr2) == {(CommEvent("ch", None, 1),)}

    def test_value_mismatch_blocks(self):
        tr1 = (CommEvent("ch", "!", 1),)
        tr2 = (CommEvent("ch", "?", 2),)
        assert sync_traces(tr1, {"ch"}, tr2) == set()

    def test_unmatched_shared_event_deadlocks(self):
        assert sync_traces((CommEvent("ch", "!", 1),), {"ch"}, ()) == {(DEADLOCK,)}

    def test_local_events_interleave(self):
        a, b = CommEvent("a", "!", 1), CommEvent("b", "?", 2)
        assert sync_traces((a,), set(), (b,)) == {(a, b), (b, a)}

    def test_symmetric(self):
        a, b = CommEvent("a", "!", 1), CommEvent("b", "?", 2)
        tr1 = (a, CommEvent("ch", "!", 3))
        tr2 = (CommEvent("ch", "?", 3), b)
        assert sync_traces(tr1, {"ch"}, tr2) == sync_traces(tr2, {"ch"}, tr1)

    def test_longer_block_is_split(self):
        tr1 = (const_block(2, x=0),)
        tr2 = (const_block(1, y=1), const_block(1, y=2))
        (result,) = sync_traces(tr1, set(), tr2)
        assert [e.duration for e in result] == [1, 1]
        assert result[1].state_at(Fraction(0)) == State({"x": 0, "y": 2})

    def test_split_shifts_paths(self):
        moving = ContEvent(Fraction(2), (("x", Add(TIME, Const(Fraction(1)))),))
        (result,) = sync_traces((moving,), set(), (const_block(1, y=0), const_block(1, y=0)))
        assert result[1].state_at(Fraction(0))["x"] == 2

    def test_incompatible_ready_sets_block(self):
        tr1 = (const_block(1, frozenset({("ch", "!")}), x=0), CommEvent("ch", "!", 1))
        tr2 = (const_block(1, frozenset({("ch", "?")}), y=0), CommEvent("ch", "?", 1))
        assert sync_traces(tr1, {"ch"}, tr2) == set()

    def test_shared_ready_heads_are_hidden(self):
        ready = frozenset({("ch", "!"), ("out", "!")})
        tr1 = (const_block(2, ready, x=0), CommEvent("ch", "!", 1))
        tr2 = (const_block(2, y=0), CommEvent("ch", "?", 1))
        (result,) = sync_traces(tr1, {"ch"}, tr2)
        assert result[0].rdy == frozenset({("out", "!")})
        assert result[1] == CommEvent("ch", None, 1)

    def test_waiting_sender_needs_a_waiting_partner(self):
        tr1 = (const_block(1, frozenset({("ch", "!")}), x=0), CommEvent("ch", "!", 1))
        tr2 = (const_block(2, y=0), CommEvent("ch", "?", 1))
        assert sync_traces(tr1, {"ch"}, tr2) == set()


def rule_sync(tr1, cs, tr2):
    """Every trace derivable by the synchronization rules, by plain recursion.

    Blocks are assumed to have constant paths, so a remainder keeps its path.
    """
    derived = set()
    if not tr1 and not tr2:
        derived.add(())
    for mine, other, mirrored in ((tr1, tr2, False), (tr2, tr1, True)):
        if not mine:
            continue
        e, rest = mine[0], mine[1:]

        def below(a, b, mirrored=mirrored):
            return rule_sync(b, cs, a) if mirrored else rule_sync(a, cs, b)

        if isinstance(e, CommEvent) and e.ch not in cs:
            derived |= {(e, *tr) for tr in below(rest, other)}
        if not other:
            if isinstance(e, CommEvent) and e.ch in cs:
                derived.add((DEADLOCK,))
            if isinstance(e, ContEvent) and below(rest, ()):
                derived.add((DEADLOCK,))
            continue
        f = other[0]
        if (
            isinstance(e, CommEvent)
            and isinstance(f, CommEvent)
            and e.ch in cs
            and e.ch == f.ch
            and (e.direction, f.direction) == ("!", "?")
            and e.value == f.value
        ):
            derived |= {(CommEvent(e.ch, None, e.value), *tr) for tr in below(rest, other[1:])}
        if isinstance(e, ContEvent) and isinstance(f, ContEvent):
            # A sender and a receiver both waiting on a shared channel would have met.
            if any(
                ((ch, "!") in e.rdy and (ch, "?") in f.rdy)
                or ((ch, "?") in e.rdy and (ch, "!") in f.rdy)
                for ch in cs
            ):
                continue
            ready = frozenset(h for h in e.rdy | f.rdy if h[0] not in cs)
            if e.duration == f.duration and not mirrored:
                block = ContEvent(e.duration, e.path + f.path, ready)
                derived |= {(block, *tr) for tr in rule_sync(rest, cs, other[1:])}
            if e.duration > f.duration:
                block = ContEvent(f.duration, e.path + f.path, ready)
                remainder = ContEvent(e.duration - f.duration, e.path, e.rdy)
                derived |= {(block, *tr) for tr in below((remainder, *rest), other[1:])}
    return derived


class TestSyncTracesExhaustive:
    """``sync_traces`` against the rules on every short pair of traces."""

    EVENTS = [
        CommEvent("ch1", "!", 1),
        CommEvent("ch1", "?", 1),
        CommEvent("ch2", "?", 1),
        const_block(1),
        const_block(2),
        const_block(2, frozenset({("ch1", "!")})),
        const_block(1, frozenset({("ch1", "?")})),
    ]

    def test_all_pairs_up_to_three_events(self):
        traces = [tr for n in range(4) for tr in itertools.product(self.EVENTS, repeat=n)]
        cs = frozenset({"ch1"})
        for tr1 in traces:
            for tr2 in traces:
                assert sync_traces(tr1, cs, tr2) == rule_sync(tr1, cs, tr2), (tr1, tr2)


class TestTraceJsonLines:
    def test_round_trip(self):
        p = parse("<x_dot = 1 & x < 2> |> [] (ch?y -> skip); ch!x")
        _, trace = execute(p, State({"x": 0, "y": 0}), Schedule([Comm(1, 0, 3), Comm(0, 0)]))
        text = trace_to_jsonl(trace)
        assert len(text.splitlines()) == len(trace)
        assert trace_from_jsonl(text) == trace


class TestSatisfaction:
    """Runs satisfy the generated assertion of their program."""

    def test_corpus_runs_satisfy_generated_assertions(self, fake):
        for p in corpus():
            assertion = generate(p).assertion
            for seed in range(15):
                s0 = random_state(fake)
                _, final, trace = random_schedule(p, s0, seed=seed, unroll=2)
                assert satisfies(s0, final, trace, assertion), (str(p), s0, trace)

    def test_random_processes(self, fake):
        for _ in range(1000):
            p = random_process(fake, fake.random_int(0, 3))
            assertion = generate(p).assertion
            s0 = random_state(fake)
            _, final, trace = random_schedule(p, s0, seed=fake.random_int(0, 10**6))
            assert satisfies(s0, final, trace, assertion), (str(p), s0, trace)

    def test_wrong_final_state_rejected(self):
        s0 = State({"x": 0})
        final, trace = execute(parse("x := 1"), s0, Schedule())
        assert not satisfies(s0, final, trace, generate(parse("x := 2")).assertion)

    def test_wrong_value_rejected(self):
        s0 = State({"x": 1})
        final, trace = execute(parse("ch!x"), s0, Schedule([Comm(0, 0)]))
        assert satisfies(s0, final, trace, generate(parse("ch!x")).assertion)
        assert not satisfies(s0, final, trace, generate(parse("ch!x + 1")).assertion)

    def test_irrational_boundary_is_inconclusive(self):
        a = generate(parse("<x_dot = y, y_dot = 1 & x < 4>")).assertion
        s0 = State({"x": 0, "y": 0})
        with pytest.raises(SatisfactionInconclusiveError, match="t1: .*irrational"):
            satisfies(s0, s0, (), a)

    def test_deadlock_satisfies_only_true(self):
        s0 = State({"x": 0})
        assert not satisfies(s0, s0, (DEADLOCK,), generate(parse("skip")).assertion)


class TestFailureReport:
    """A rejected run names the part of the assertion it got furthest into."""

    def test_furthest_disjunct(self):
        left = generate(parse("ch1?x")).assertion
        right = generate(parse("ch1?x; ch2!x")).assertion
        s0 = State({"x": 0})
        trace = (CommEvent("ch1", "?", Fraction(3)), CommEvent("ch2", "!", Fraction(3)))
        verdict = check_run(s0, State({"x": 4}), trace, Disj(left, right))
        assert not verdict.holds
        failure = verdict.failure
        assert failure.trail == ("right disjunct", "ch1? branch")
        assert failure.consumed == 2
        assert failure.reason == "final value of x differs"
        assert str(failure) == (
            "right disjunct > ch1? branch: final value of x differs (after 2 events)"
        )

    def test_loop_iterations(self):
        loop = generate(parse("(ch1?x)*")).assertion
        trace = (CommEvent("ch1", "?", Fraction(1)), CommEvent("ch1", "?", Fraction(2)))
        verdict = check_run(State({"x": 0}), State({"x": 5}), trace, loop)
        assert verdict.failure.trail == (
            "R1 iteration", "ch1? branch", "R1 iteration", "ch1? branch", "R1 exit"
        )
        assert verdict.failure.reason == "final value of x differs"

    def test_wrong_value_on_output(self):
        s0 = State({"x": 1})
        final, trace = execute(parse("ch!x"), s0, Schedule([Comm(0, 0)]))
        verdict = check_run(s0, final, trace, generate(parse("ch!x + 1")).assertion)
        assert verdict.failure.consumed == 0
        assert verdict.failure.reason == "expected ch! carrying 2, got ch! carrying 1"

    def test_accepted_run_has_no_failure(self):
        s0 = State({"x": 1})
        final, trace = execute(parse("ch!x"), s0, Schedule([Comm(0, 0)]))
        assert check_run(s0, final, trace, generate(parse("ch!x")).assertion).failure is None

    def test_deadlock(self):
        s0 = State({"x": 0})
        verdict = check_run(s0, s0, (DEADLOCK,), generate(parse("skip")).assertion)
        assert verdict.failure.reason == "the run deadlocks"
