"""Tests for expressions, simplification, evaluation and SMT-LIB export."""

from fractions import Fraction

import pytest
import z3

from hcsp_tools.exceptions import DivisionByZeroError, StateMergeError, UnboundVariableError
from hcsp_tools.lang.parser import parse_bexpr, parse_expr
from hcsp_tools.symbolic.evaluate import State, evaluate
from hcsp_tools.symbolic.expr import (
    FALSE,
    TRUE,
    And,
    Const,
    Implies,
    Not,
    Or,
    Var,
    program_vars,
    substitute,
)
from hcsp_tools.symbolic.simplify import simplify, to_nnf
from hcsp_tools.symbolic.smtlib import build_script, to_smtlib

from .strategies import VARS, random_bexpr, random_expr, random_state


class TestEvaluate:
    """Concrete evaluation over exact rationals."""

    def test_strict_bound_at_the_boundary(self):
        assert evaluate(parse_bexpr("x < 5"), State({"x": 5})) is False

    def test_polynomial_matches_direct_computation(self, fake):
        e = parse_expr("2 * am * (op - (p + v * T))")
        for _ in range(20):
            values = {
                name: Fraction(fake.random_int(-40, 40), fake.random_int(1, 8))
                for name in ("am", "op", "p", "v", "T")
            }
            expected = 2 * values["am"] * (values["op"] - (values["p"] + values["v"] * values["T"]))
            assert evaluate(e, State(values)) == expected

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariableError, match="Unbound variable: y"):
            evaluate(parse_expr("x + y"), State({"x": 1}))

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZeroError):
            evaluate(parse_expr("1 / x"), State({"x": 0}))


class TestState:
    def test_merge_disjoint(self):
        merged = State({"x": 1}).merge(State({"y": 2}))
        assert merged == State({"x": 1, "y": 2})

    def test_merge_overlap_rejected(self):
        with pytest.raises(StateMergeError, match="x"):
            State({"x": 1}).merge(State({"x": 2}))

    def test_update_is_persistent(self):
        s = State({"x": 1})
        assert s.update("x", 3)["x"] == 3
        assert s["x"] == 1


class TestSimplify:
    """The rewrite set folds constants and keeps results evaluable."""

    def test_constant_folding(self):
        assert simplify(parse_expr("1 + 2 * 3")) == Const(Fraction(7))

    def test_trivial_comparisons(self):
        assert simplify(parse_bexpr("1 < 2")) == TRUE
        assert simplify(parse_bexpr("x < 5 && false")) == FALSE

    def test_simplify_preserves_value(self, fake):
        exprs = [
            "x * (y + 1) - x * y",
            "(x + 1) ^ 2 - x ^ 2",
            "x / 2 + x / 2",
            "-(x - y) + (x - y)",
        ]
        for text in exprs:
            e = parse_expr(text)
            for _ in range(2500):
                s = State({"x": fake.random_int(-20, 20), "y": fake.random_int(-20, 20)})
                assert evaluate(simplify(e), s) == evaluate(e, s)

    def test_idempotent(self):
        e = simplify(parse_expr("x * (y + 1) - 3 * (x - 2)"))
        assert simplify(e) == e

    def test_random_expressions_keep_their_value(self, fake):
        for _ in range(2000):
            e, b = random_expr(fake, 4), random_bexpr(fake, 2)
            se, sb = simplify(e), simplify(b)
            for _ in range(5):
                s = random_state(fake)
                assert evaluate(se, s) == evaluate(e, s), (e, se, s)
                assert evaluate(sb, s) == evaluate(b, s), (b, sb, s)


def connectives(b):
    """Types of the non-atomic nodes of ``b``."""
    if isinstance(b, Not):
        return [Not, *connectives(b.arg)]
    if isinstance(b, And | Or | Implies):
        return [type(b), *connectives(b.left), *connectives(b.right)]
    return []


class TestNegationNormalForm:
    def test_keeps_value(self, fake):
        for _ in range(2000):
            b = random_bexpr(fake, 3)
            nnf = to_nnf(b)
            assert Not not in connectives(nnf) and Implies not in connectives(nnf)
            for _ in range(5):
                s = random_state(fake)
                assert evaluate(nnf, s) == evaluate(b, s), (b, nnf, s)

    def test_negated_equality_splits(self):
        assert to_nnf(parse_bexpr("!(x == 1)")) == parse_bexpr("x < 1 || x > 1")


class TestSubstitution:
    def test_substitute_program_variable(self):
        e = substitute(parse_expr("x + y"), "x", parse_expr("y * 2"))
        assert evaluate(e, State({"y": 3})) == 9

    def test_substitution_lemma(self, fake):
        """``e[r/x]`` in ``s`` is ``e`` in ``s`` with ``x`` set to the value of ``r``."""
        for _ in range(10_000):
            x = fake.random_element(VARS)
            e, b, r = random_expr(fake, 3), random_bexpr(fake, 1), random_expr(fake, 2)
            s = random_state(fake)
            updated = s.update(x, evaluate(r, s))
            assert evaluate(substitute(e, x, r), s) == evaluate(e, updated)
            assert evaluate(substitute(b, x, r), s) == evaluate(b, updated)

    def test_program_vars(self):
        assert program_vars(parse_bexpr("x < 5 && y == z")) == {"x", "y", "z"}
        assert Var("x") in {Var("x")}


class TestSmtlib:
    def test_script_shape(self):
        text = to_smtlib(parse_bexpr("x < 5"), parse_bexpr("x == 3"), "origin: goal")
        lines = text.splitlines()
        assert lines[0] == "; origin: goal"
        assert "(set-logic QF_NRA)" in lines
        assert "(declare-fun x () Real)" in lines
        assert lines[-2:] == ["(check-sat)", "(exit)"]
        assert text.count("(assert") == 2

    def test_rational_constants(self):
        text = to_smtlib(parse_bexpr("x <= 1/2"))
        assert "(/ 1.0 2.0)" in text

    def test_scripts_parse_back(self, fake):
        """z3 reads every script; its constants are the declared variables and
        the negated goal holds exactly where the goal is false."""
        for _ in range(300):
            goal = random_bexpr(fake, 2)
            script = build_script(goal)
            parsed = z3.parse_smt2_string(script.body())
            assert len(parsed) == 1
            assertion = parsed[0]
            declared = {line.split()[1] for line in script.declarations}
            assert declared == set(uninterpreted(assertion)) == program_vars(goal)
            s = random_state(fake)
            solver = z3.Solver()
            solver.add(assertion)
            for name in VARS:
                value = s[name]
                solver.add(z3.Real(name) == z3.Q(value.numerator, value.denominator))
            expected = z3.unsat if evaluate(goal, s) else z3.sat
            assert solver.check() == expected, script.render()


def uninterpreted(e):
    if z3.is_const(e) and e.decl().kind() == z3.Z3_OP_UNINTERPRETED:
        yield e.decl().name()
    for child in e.children():
        yield from uninterpreted(child)
