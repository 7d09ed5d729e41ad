"""Tests for assertion generation of sequential processes."""

import pytest

from hcsp_tools.assertions.assn import (
    FALSE_A,
    INIT,
    BoolLift,
    Disj,
    InterruptInf,
    Rec,
    Wait,
    WaitIn,
    WaitOutv,
    leaf_count,
    walk,
)
from hcsp_tools.assertions.printer import pretty_assertion
from hcsp_tools.exceptions import InvalidProcessError
from hcsp_tools.generator.spec_of import NameSupply, generate
from hcsp_tools.lang.parser import parse
from hcsp_tools.symbolic.expr import FALSE, FreshTime


class TestGenerate:
    """Shape of generated assertions."""

    def test_skip_is_init(self):
        assert generate(parse("skip")).assertion == INIT

    def test_evolution_with_boundary(self):
        result = generate(parse("<x_dot = 1 & x < 5>"))
        a = result.assertion
        assert isinstance(a, BoolLift)
        assert isinstance(a.body, Wait)
        assert a.body.delay == FreshTime(1)
        assert [t for t, _ in result.fresh_vars] == [FreshTime(1)]

    def test_evolution_printed(self):
        text = pretty_assertion(generate(parse("<x_dot = 1 & x < 5>")).assertion)
        assert text.startswith("↑(t1 = ")
        assert "wait(s = s0[x ↦ " in text
        assert ", t1, {d ⇒ init[x := " in text

    def test_unbounded_evolution_is_false(self):
        assert generate(parse("<x_dot = 1 & true>")).assertion == FALSE_A

    def test_internal_choice_is_disjunction(self):
        a = generate(parse("x := 1 $ x := 2")).assertion
        assert isinstance(a, Disj)
        assert leaf_count(a) == 2

    def test_conditional_guards_both_branches(self):
        a = generate(parse("if x < 0 then x := 0 else skip endif")).assertion
        assert isinstance(a, Disj)
        assert isinstance(a.left, BoolLift) and isinstance(a.right, BoolLift)

    def test_communications(self):
        assert isinstance(generate(parse("ch?x")).assertion, WaitIn)
        assert isinstance(generate(parse("ch!x + 1")).assertion, WaitOutv)

    def test_plant_loop(self, cruise_job):
        a = generate(cruise_job.processes["A"]).assertion
        nodes = list(walk(a))
        assert any(isinstance(n, Rec) for n in nodes)
        assert any(isinstance(n, InterruptInf) for n in nodes)
        assert pretty_assertion(a).startswith("wait_outv(id_inv, ch1, v, ")

    def test_parallel_rejected(self):
        with pytest.raises(InvalidProcessError, match="sequential"):
            generate(parse("ch!1 ||[ch] ch?x"))


class TestNameSupply:
    def test_shared_supply_keeps_times_apart(self):
        names = NameSupply()
        first = generate(parse("<x_dot = 1 & x < 5>"), names)
        second = generate(parse("<y_dot = 1 & y < 5>"), names)
        assert first.fresh_vars[0][0] == FreshTime(1)
        assert second.fresh_vars[0][0] == FreshTime(2)

    def test_recursion_names(self):
        names = NameSupply()
        assert [names.rec_name(), names.rec_name()] == ["R1", "R2"]


class TestObligations:
    """Side conditions emitted during generation."""

    def test_division_by_variable(self):
        obligations = generate(parse("x := 1 / y")).obligations
        assert [o.origin for o in obligations] == ["division"]
        assert "y" in str(obligations[0])

    def test_constant_division_is_free(self):
        assert generate(parse("x := y / 2")).obligations == []

    @pytest.mark.parametrize("text", ["x := y / 0", "x := 1 / (y - y)", "ch!x / 0"])
    def test_division_by_zero_is_a_failing_obligation(self, text):
        (ob,) = generate(parse(text)).obligations
        assert ob.origin == "division"
        assert ob.goal == FALSE

    def test_implicit_boundary(self):
        obligations = generate(parse("<p_dot = v, v_dot = 1 & p < 8>")).obligations
        assert [o.origin for o in obligations] == ["least-crossing"]

    def test_obligation_script(self):
        (ob,) = generate(parse("x := 1 / y")).obligations
        text = ob.script().render()
        assert text.startswith("; origin: division")
        assert "(check-sat)" in text
