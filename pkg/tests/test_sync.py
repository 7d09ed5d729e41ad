"""Tests for guard decisions, process prefixes and parallel synchronization."""

from dataclasses import replace
from fractions import Fraction

import pytest

from hcsp_tools.assertions.assn import (
    FALSE_A,
    INIT,
    IOSync,
    Rec,
    RecVar,
    Subst,
    children,
    unfold,
    walk,
    with_children,
)
from hcsp_tools.exceptions import MixedPrefixError, NameCollisionError, RecRulePremiseError
from hcsp_tools.generator.spec_of import generate
from hcsp_tools.lang.parser import parse, parse_bexpr, parse_expr
from hcsp_tools.models import JobFile
from hcsp_tools.sync.decide import GuardDecider, linear_conflict
from hcsp_tools.sync.engine import MUTATIONS, Context, SyncEngine, synchronize
from hcsp_tools.sync.naming import check_disjoint, lift, prefix_process
from hcsp_tools.symbolic.expr import FALSE, Add, Const
from hcsp_tools.verify.job import compile_job
from hcsp_tools.verify.oracle import OracleChecker
from hcsp_tools.verify.service import VerificationService


def job(processes, parallel, **fields):
    return compile_job(
        JobFile.model_validate({"processes": processes, "parallel": parallel, **fields})
    )


def facts(*texts):
    return [parse_bexpr(t) for t in texts]


class TestLinearConflict:
    def test_disjoint_bounds(self):
        assert linear_conflict(facts("x < 1", "x > 2"))

    def test_overlapping_bounds(self):
        assert not linear_conflict(facts("x < 1", "x > 0"))

    def test_equalities_are_eliminated(self):
        assert linear_conflict(facts("x == y + 1", "y == 2", "x < 3"))
        assert not linear_conflict(facts("x == y + 1", "y == 2", "x <= 3"))

    def test_chained_inequalities(self):
        assert linear_conflict(facts("x < y", "y < z", "z < x"))


class TestGuardDecider:
    """Each tier settles the guards it can."""

    def test_false_guard_is_syntactic(self):
        decider = GuardDecider()
        assert decider.decide([], FALSE) == "conflict"
        assert decider.stats.syntactic == 1

    def test_linear_tier(self):
        decider = GuardDecider()
        assert decider.decide(facts("x < 1"), parse_bexpr("x > 2")) == "conflict"
        assert decider.stats.linear == 1

    def test_nonlinear_goes_to_z3(self):
        decider = GuardDecider()
        assert decider.decide([], parse_bexpr("x * x < 0")) == "conflict"
        assert decider.decide(facts("x < 1"), parse_bexpr("x < 5")) == "consistent"
        assert decider.stats.smt == 2

    def test_without_z3_nonlinear_is_undecided(self):
        decider = GuardDecider(use_z3=False)
        assert decider.decide([], parse_bexpr("x * x < 0")) == "unknown"
        assert decider.stats.undecided == 1

    def test_answers_are_cached(self):
        decider = GuardDecider()
        for _ in range(3):
            decider.decide(facts("x < 1"), parse_bexpr("x > 2"))
        assert decider.stats.as_dict() == {"syntactic": 0, "linear": 1, "smt": 0, "undecided": 0}


class TestNaming:
    def test_prefix_renames_program_variables(self):
        named = prefix_process("A", generate(parse("ch?x; y := x + 1")).assertion)
        assert named.name == "A"
        assert named.variables == {"Ax", "Ay"}

    def test_prefix_checks(self):
        a = generate(parse("x := 1")).assertion
        with pytest.raises(NameCollisionError, match="already in use"):
            prefix_process("A", a, taken=["A"])
        with pytest.raises(NameCollisionError, match="not a usable prefix"):
            prefix_process("1A", a)
        with pytest.raises(NameCollisionError, match="already prefixed"):
            prefix_process("B", prefix_process("A", a))

    def test_colliding_variables(self):
        left = prefix_process("A", generate(parse("bx := 1")).assertion)
        right = prefix_process("Ab", generate(parse("x := 1")).assertion)
        with pytest.raises(NameCollisionError, match="collide"):
            check_disjoint(left, right)

    def test_same_name_twice(self):
        a = prefix_process("A", generate(parse("x := 1")).assertion)
        with pytest.raises(NameCollisionError, match="used twice"):
            synchronize([], a, a)

    def test_lift_rejects_mixed_expressions(self):
        named = prefix_process("A", generate(parse("x := y")).assertion)
        assert lift(parse_expr("Ax + Ay"), named) == parse_expr("Ax + Ay")
        with pytest.raises(MixedPrefixError, match="mixes variables of A"):
            lift(parse_expr("Ax + By"), named)


# Small systems whose random runs must satisfy the synchronized assertion.
SYSTEMS = {
    "handshake": ({"A": "ch!x", "B": "ch?y"}, ["ch"]),
    "two channels": ({"A": "ch1!x; ch2?x", "B": "ch1?y; ch2!y + 1"}, ["ch1", "ch2"]),
    "delayed sender": ({"A": "wait 1; ch!x", "B": "ch?y"}, ["ch"]),
    "interrupt": (
        {"A": "<x_dot = 1 & x < 2> |> [] (ch!x -> skip)", "B": "wait 1; ch?y"},
        ["ch"],
    ),
    "choice": (
        {"A": "(x := 1 $ x := 2); ch!x", "B": "ch?y; if y < 2 then y := 0 else skip endif"},
        ["ch"],
    ),
    "two waits": ({"A": "wait 1; ch!x", "B": "wait 2; ch?y"}, ["ch"]),
    "external output": ({"A": "ch2!x; ch1!x", "B": "ch1?y"}, ["ch1"]),
    "zero wait": ({"A": "wait x", "B": "skip"}, ["ch"]),
}


def synced_system(settings, processes, chans, mutation=None):
    names = list(processes)
    j = job(processes, {"left": names[0], "chans": chans, "right": names[1]})
    service = VerificationService(settings)
    named, _ = service.generate(j)
    return service, j, service.synchronize(j, named, mutation=mutation)


class TestSynchronize:
    """Synchronized assertions are checked against random parallel runs."""

    @pytest.mark.parametrize("system", list(SYSTEMS))
    def test_random_runs_satisfy(self, settings, system):
        service, j, synced = synced_system(settings, *SYSTEMS[system])
        summary = service.check_oracle(j, synced, samples=200, seed=3, unroll=1)
        assert summary.failed == 0, summary.counterexamples
        assert summary.passed > 0

    def test_handshake_is_an_internal_event(self, settings):
        _, _, synced = synced_system(settings, *SYSTEMS["handshake"])
        events = [n for n in walk(synced.assertion) if isinstance(n, IOSync)]
        assert events and all(e.ch == "ch" for e in events)

    def test_skip_with_skip(self, settings):
        _, _, synced = synced_system(settings, {"A": "skip", "B": "skip"}, [])
        assert synced.assertion == INIT
        assert synced.obligations == []

    def test_false_initial_condition_prunes_everything(self, settings):
        j = job(
            {"A": "if x < 0 then x := 0 else skip endif; ch!x", "B": "ch?y"},
            {"left": "A", "chans": ["ch"], "right": "B"},
            init_cond="false",
        )
        service = VerificationService(settings)
        named, _ = service.generate(j)
        assert service.synchronize(j, named).assertion == FALSE_A

    def test_three_processes(self, settings):
        j = job(
            {"A": "ch1!x", "B": "ch1?y; ch2!y", "C": "ch2?z"},
            {"left": {"left": "A", "chans": ["ch1"], "right": "B"}, "chans": ["ch2"], "right": "C"},
        )
        service = VerificationService(settings)
        named, _ = service.generate(j)
        synced = service.synchronize(j, named)
        assert synced.named.prefixes == ("A", "B", "C")
        summary = service.check_oracle(j, synced, samples=200, seed=0, unroll=1)
        assert summary.failed == 0
        assert summary.passed > 0


def bump_values(a):
    a = with_children(a, tuple(bump_values(c) for c in children(a)))
    if isinstance(a, IOSync):
        return IOSync(a.ch, Add(a.value, Const(Fraction(1))), a.body)
    return a


def bump_assignments(a):
    a = with_children(a, tuple(bump_assignments(c) for c in children(a)))
    if isinstance(a, Subst):
        return Subst(a.body, tuple((x, Add(e, Const(Fraction(1)))) for x, e in a.pairs))
    return a


class TestMutations:
    """A wrong synchronized assertion is caught by the oracle."""

    @pytest.mark.parametrize("mutate", [bump_values, bump_assignments])
    def test_mutated_assertion_fails(self, settings, mutate):
        _, j, synced = synced_system(settings, *SYSTEMS["handshake"])
        mutated = mutate(synced.assertion)
        assert mutated != synced.assertion
        pc = j.composition()
        checker = OracleChecker(pc, mutated, j.init_cond, ["Ax", "By"])
        summary = checker.run(5, seed=1, workers=1)
        assert summary.failed > 0
        assert summary.counterexamples[0].trace

    def test_unmutated_assertion_passes(self, settings):
        _, j, synced = synced_system(settings, *SYSTEMS["handshake"])
        checker = OracleChecker(j.composition(), synced.assertion, j.init_cond, ["Ax", "By"])
        assert checker.run(5, seed=1, workers=1).failed == 0

    @pytest.mark.parametrize(
        "mutation, system",
        [
            ("receive-zero", "handshake"),
            ("drop-substitution", "handshake"),
            ("swap-race", "two waits"),
            ("no-escape", "zero wait"),
            ("drop-external", "external output"),
        ],
    )
    def test_broken_rule_is_caught(self, settings, mutation, system):
        service, j, synced = synced_system(settings, *SYSTEMS[system], mutation=mutation)
        summary = service.check_oracle(j, synced, samples=50, seed=3, unroll=1)
        assert summary.failed > 0

    def test_every_mutation_is_exercised(self):
        assert MUTATIONS == {
            "receive-zero", "drop-substitution", "swap-race", "no-escape", "drop-external"
        }

    def test_unknown_mutation_rejected(self):
        with pytest.raises(ValueError, match="unknown rule mutation"):
            SyncEngine(["ch"], mutation="flip-everything")

    def test_broken_rule_is_caught_on_cruise_control(self, settings, cruise_job):
        service = VerificationService(settings)
        named, _ = service.generate(cruise_job)
        synced = service.synchronize(cruise_job, named, mutation="receive-zero")
        summary = service.check_oracle(cruise_job, synced, samples=20, seed=7, unroll=1)
        assert summary.failed > 0
        case = summary.counterexamples[0]
        assert case.reason.startswith("the run does not satisfy the synchronized assertion: ")
        assert any(step.endswith(("exit", "iteration")) for step in case.assertion_path)


class TestRecursionRule:
    """Loop iterations of the two sides must end together."""

    def test_iteration_end_against_termination(self):
        with pytest.raises(RecRulePremiseError):
            SyncEngine(["ch"]).sync(RecVar("R1"), INIT, Context())

    def test_iteration_end_against_unrelated_loop_variable(self):
        with pytest.raises(RecRulePremiseError, match="do not line up"):
            SyncEngine(["ch"]).sync(RecVar("R1"), RecVar("R2"), Context())

    def test_loops_of_different_length(self, settings):
        with pytest.raises(RecRulePremiseError):
            synced_system(settings, {"A": "(ch!x)*", "B": "(ch?y; ch?y)*"}, ["ch"])

    def test_unfolding_commutes_with_synchronization(self, settings):
        """Synchronizing unfolded loops accepts the runs the unfolded synchronized loop does."""
        j = job(
            {"A": "(ch!x; x := x + 1)*", "B": "(ch?y)*"},
            {"left": "A", "chans": ["ch"], "right": "B"},
        )
        service = VerificationService(settings)
        named, _ = service.generate(j)
        synced = service.synchronize(j, named).assertion
        assert isinstance(synced, Rec)
        left, right = (replace(named[n], assertion=unfold(named[n].assertion, 3)) for n in "AB")
        unfolded_first = synchronize(["ch"], left, right).assertion
        passed = []
        for a in (synced, unfold(synced, 3), unfolded_first):
            checker = OracleChecker(j.composition(), a, j.init_cond, ["Ax", "By"], unroll=3)
            summary = checker.run(60, seed=5, workers=1)
            assert summary.failed == 0, summary.counterexamples
            passed.append(summary.passed)
        assert passed[0] > 0
        assert len(set(passed)) == 1


class TestCruiseControl:
    """The bundled cruise-control job."""

    @pytest.fixture
    def synced(self, settings, cruise_job):
        """Synchronize the cruise-control job once per test."""
        service = VerificationService(settings)
        named, _ = service.generate(cruise_job)
        return service, service.synchronize(cruise_job, named)

    def test_loop_branches(self, synced):
        _, result = synced
        assert [(b.generated, b.pruned, b.kept) for b in result.branch_stats] == [(21, 10, 11)]

    def test_loop_obligations(self, synced):
        _, result = synced
        origins = {o.origin for o in result.obligations}
        assert {"rec-entry", "rec-inductive", "goal"} <= origins

    def test_oracle_spot_check(self, synced, cruise_job):
        service, result = synced
        summary = service.check_oracle(cruise_job, result, samples=200, seed=7, unroll=2)
        assert summary.failed == 0, summary.counterexamples
