"""Tests for the assertion rewrites: substitution, delay, normalization."""

import re
from fractions import Fraction

import pytest

from hcsp_tools.assertions.assn import (
    FALSE_A,
    INIT,
    TRUE_A,
    BoolLift,
    Conj,
    Disj,
    Interrupt,
    Rec,
    Subst,
    WaitIn,
    bind,
    conj_a,
    unfold,
)
from hcsp_tools.assertions.printer import pretty_assertion
from hcsp_tools.assertions.rewrite import (
    delay_assertion,
    make_subst,
    mono_rewrite,
    normalize,
    push_subst,
)
from hcsp_tools.exceptions import AssertionPositionError
from hcsp_tools.generator.spec_of import generate
from hcsp_tools.lang.parser import parse, parse_expr
from hcsp_tools.semantics.sampling import random_schedule
from hcsp_tools.semantics.satisfaction import satisfies
from hcsp_tools.semantics.trace import CommEvent, ContEvent
from hcsp_tools.symbolic.evaluate import State
from hcsp_tools.symbolic.expr import FALSE, TIME, ZERO, Add, Const

from .strategies import corpus, random_state


def runs(p, states, seeds=range(5)):
    """Concrete triples ``(s0, s, tr)`` of ``p``."""
    for s0 in states:
        for seed in seeds:
            _, final, trace = random_schedule(p, s0, seed=seed, unroll=1)
            yield s0, final, trace


class TestSubstitution:
    def test_nested_substitutions_fold(self):
        a = make_subst(make_subst(INIT, {"x": parse_expr("x + 1")}), {"x": parse_expr("2 * x")})
        assert isinstance(a, Subst) and a.body == INIT
        assert satisfies(State({"x": 1}), State({"x": 3}), (), a)

    def test_identity_pairs_dropped(self):
        assert make_subst(INIT, {"x": parse_expr("x")}) == INIT

    def test_push_preserves_satisfaction(self, fake):
        p = parse("ch1!x; x := x + y; <x_dot = 1 & x < 5>")
        a = generate(p).assertion
        pairs = {"x": parse_expr("y + 1")}
        explicit, pushed = Subst(a, (("x", pairs["x"]),)), push_subst(a, pairs)
        for _ in range(20):
            s0 = random_state(fake, ["x", "y"])
            start = s0.update("x", s0["y"] + 1)
            for _, final, trace in runs(p, [start], seeds=range(3)):
                assert satisfies(s0, final, trace, explicit)
                assert satisfies(s0, final, trace, pushed)

    def test_push_agrees_on_foreign_runs(self, fake):
        p, other = parse("x := x * 2; ch1!x"), parse("ch1!x + 1")
        a = generate(p).assertion
        pairs = {"x": parse_expr("x - 1")}
        explicit, pushed = Subst(a, (("x", pairs["x"]),)), push_subst(a, pairs)
        for s0, final, trace in runs(other, [random_state(fake, ["x"]) for _ in range(10)]):
            assert satisfies(s0, final, trace, explicit) == satisfies(s0, final, trace, pushed)


class TestDelay:
    """``delay`` shifts a waiting assertion forward in time."""

    @pytest.fixture
    def interrupt(self):
        a = generate(parse("<x_dot = 1 & x < 10> |> [] (ch?y -> skip)")).assertion
        assert isinstance(a, BoolLift) and isinstance(a.body, Interrupt)
        return a

    def test_zero_delay_is_identity(self, interrupt):
        assert delay_assertion(Const(Fraction(0)), interrupt.body) == interrupt.body

    def test_delays_compose(self, interrupt, fake):
        p = parse("<x_dot = 1 & x < 10> |> [] (ch?y -> skip)")
        five = BoolLift(interrupt.cond, delay_assertion(Const(Fraction(5)), interrupt.body))
        two_three = BoolLift(
            interrupt.cond,
            delay_assertion(
                Const(Fraction(2)), delay_assertion(Const(Fraction(3)), interrupt.body)
            ),
        )
        agreed = 0
        for _ in range(10):
            s0 = State({"x": Fraction(fake.random_int(-8, 8), 2), "y": 0})
            start = s0.update("x", s0["x"] + 5)
            for _, final, trace in runs(p, [start]):
                assert satisfies(s0, final, trace, five)
                assert satisfies(s0, final, trace, two_three)
                agreed += 1
        assert agreed == 50

    def test_delays_compose_on_many_runs(self, interrupt, fake):
        five = BoolLift(interrupt.cond, delay_assertion(Const(Fraction(5)), interrupt.body))
        two_three = BoolLift(
            interrupt.cond,
            delay_assertion(
                Const(Fraction(2)), delay_assertion(Const(Fraction(3)), interrupt.body)
            ),
        )
        ready = frozenset({("ch", "?")})

        def block(x, d):
            path = (("x", Add(Const(x), TIME)), ("y", Const(Fraction(0))))
            return ContEvent(d, path, ready)

        checked = 0
        while checked < 10_000:
            s0 = State({"x": Fraction(fake.random_int(-24, 24), 4), "y": Fraction(0)})
            x = s0["x"] + 5
            limit = max(5 - s0["x"], Fraction(0))
            timeout = ((block(x, limit),) if limit > 0 else (), State({"x": x + limit, "y": 0}))
            cases = [(*timeout, True)]
            if limit > 0:
                d = limit * Fraction(fake.random_int(0, 99), 100)
                v = Fraction(fake.random_int(-9, 9))
                head = (block(x, d),) if d > 0 else ()
                trace = (*head, CommEvent("ch", "?", v))
                cases.append((trace, State({"x": x + d, "y": v}), True))
                cases.append((trace, State({"x": x + d + 1, "y": v}), False))
            for trace, final, expected in cases:
                assert satisfies(s0, final, trace, five) == expected, (s0, trace, final)
                assert satisfies(s0, final, trace, two_three) == expected, (s0, trace, final)
                checked += 1

    def test_instantiated_delay_is_simplified(self, interrupt):
        shifted = bind(("e",), lambda e: delay_assertion(e, interrupt.body)).instantiate(ZERO)
        text = pretty_assertion(shifted)
        assert not re.search(r"[+-] 0(?![\w./])|(?<![\w./])0 \+", text), text

    def test_delay_rejects_non_waiting(self):
        with pytest.raises(TypeError, match="waiting assertions"):
            delay_assertion(Const(Fraction(1)), INIT)


class TestNormalize:
    def test_units_and_false(self):
        a = generate(parse("ch?x; x := x + 1")).assertion
        assert normalize(Disj(FALSE_A, Conj(TRUE_A, a))) == a
        assert normalize(Conj(a, FALSE_A)) == FALSE_A
        assert normalize(Disj(a, TRUE_A)) == TRUE_A

    def test_generated_assertions_are_normal(self):
        for p in corpus():
            a = generate(p).assertion
            assert normalize(a) == a

    def test_conjunction_units(self):
        a = generate(parse("ch?x")).assertion
        assert normalize(Conj(TRUE_A, TRUE_A)) == TRUE_A
        assert normalize(Conj(Conj(a, TRUE_A), a)) == Conj(a, a)
        assert conj_a(a, FALSE_A, a) == FALSE_A
        assert conj_a() == TRUE_A

    def test_false_guard(self):
        assert normalize(BoolLift(FALSE, INIT)) == FALSE_A


class TestMonoRewrite:
    def test_weakening_keeps_runs(self, fake):
        p = parse("ch?x; x := x + 1")
        a = generate(p).assertion
        assert isinstance(a, WaitIn)
        weaker = mono_rewrite(a, {(0,): TRUE_A})
        assert pretty_assertion(weaker).endswith("⇒ true})")
        for s0, final, trace in runs(p, [random_state(fake, ["x"]) for _ in range(5)]):
            assert satisfies(s0, final, trace, a)
            assert satisfies(s0, final, trace, weaker)

    def test_invalid_position(self):
        a = generate(parse("ch?x")).assertion
        with pytest.raises(AssertionPositionError, match="invalid at depth 1"):
            mono_rewrite(a, {(0, 5): TRUE_A})


def iterations(trace):
    return sum(1 for e in trace if isinstance(e, CommEvent) and e.ch == "ch2")


class TestUnfold:
    """A loop assertion holds exactly when one of its finite unfoldings does."""

    @pytest.fixture
    def loop(self):
        a = generate(parse("(wait 1; ch2!x; x := x * 2)*; ch1?y")).assertion
        assert isinstance(a, Rec)
        return a

    def test_runs_match_their_unfolding(self, loop, fake):
        p = parse("(wait 1; ch2!x; x := x * 2)*; ch1?y")
        for _ in range(30):
            s0 = random_state(fake, ["x", "y"])
            for seed in range(5):
                _, final, trace = random_schedule(p, s0, seed=seed, unroll=3)
                k = iterations(trace)
                assert satisfies(s0, final, trace, loop)
                assert satisfies(s0, final, trace, unfold(loop, k))
                if k > 0:
                    assert not satisfies(s0, final, trace, unfold(loop, k - 1))

    def test_unfoldings_only_grow(self, loop, fake):
        """Every unfolding entails the next one and the loop itself."""
        other = parse("(wait 1; ch2!x; x := x * 3)*; ch1?y")
        for _ in range(30):
            s0 = random_state(fake, ["x", "y"])
            for seed in range(5):
                _, final, trace = random_schedule(other, s0, seed=seed, unroll=3)
                verdicts = [satisfies(s0, final, trace, unfold(loop, n)) for n in range(5)]
                assert verdicts == sorted(verdicts)
                assert satisfies(s0, final, trace, loop) == verdicts[-1]

    def test_false_step_is_the_base(self, fake):
        base = generate(parse("ch1?y")).assertion
        rec = Rec("R9", base, FALSE_A)
        for p in (parse("ch1?y"), parse("ch1?x"), parse("wait 1; ch1?y")):
            for s0, final, trace in runs(p, [random_state(fake, ["x", "y"]) for _ in range(10)]):
                expected = satisfies(s0, final, trace, base)
                assert satisfies(s0, final, trace, rec) == expected
                assert satisfies(s0, final, trace, unfold(rec, 3)) == expected
