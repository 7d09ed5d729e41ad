"""Tests for the command line interface."""

import json
from unittest.mock import patch

import pytest
from typer.testing import CliRunner

from hcsp_tools.cli import (
    EXIT_COUNTEREXAMPLE,
    EXIT_ERROR,
    EXIT_OBLIGATION_FAILED,
    EXIT_OK,
    app,
    exit_code,
)
from hcsp_tools.models import ObligationRecord, OracleCase, OracleSummary, VerificationReport

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """Run every command from an empty directory with a single oracle worker."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HCSP_ORACLE_WORKERS", "1")
    monkeypatch.delenv("HCSP_SMT_COMMAND", raising=False)


@pytest.fixture
def program(tmp_path):
    """Write a program file and return its path."""

    def write(text, name="prog.hcsp"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


def report(failed_obligation=False, counterexample=False):
    obligations = [
        ObligationRecord(
            file="obligations/001-goal.smt2",
            origin="goal",
            hypothesis="true",
            goal="Ap <= Bop",
            status="failed" if failed_obligation else "discharged",
        )
    ]
    oracle = OracleSummary(samples=1, passed=1)
    if counterexample:
        case = OracleCase(index=0, seed=7, outcome="fail", reason="mismatch")
        oracle = OracleSummary(samples=1, failed=1, counterexamples=[case])
    return VerificationReport(job="demo", obligations=obligations, oracle=oracle)


class TestExitCode:
    @pytest.mark.parametrize(
        "failed_obligation, counterexample, expected",
        [
            (False, False, EXIT_OK),
            (True, False, EXIT_OBLIGATION_FAILED),
            (False, True, EXIT_COUNTEREXAMPLE),
            (True, True, EXIT_COUNTEREXAMPLE),
        ],
    )
    def test_precedence(self, failed_obligation, counterexample, expected):
        assert exit_code(report(failed_obligation, counterexample)) == expected


class TestFmt:
    def test_prints_canonical_form(self, program):
        result = runner.invoke(app, ["fmt", str(program("x:=x+1;ch!x"))])
        assert result.exit_code == 0
        assert "x := x+1; ch!x" in result.output

    def test_syntax_error(self, program):
        result = runner.invoke(app, ["fmt", str(program("x := ;"))])
        assert result.exit_code == EXIT_ERROR
        assert "line 1, column" in result.output

    def test_missing_file(self, tmp_path):
        result = runner.invoke(app, ["fmt", str(tmp_path / "nope.hcsp")])
        assert result.exit_code == EXIT_ERROR
        assert "Cannot read" in result.output


class TestSpec:
    def test_prints_assertion_and_obligations(self, program):
        result = runner.invoke(app, ["spec", str(program("ch!x; x := 1 / y"))])
        assert result.exit_code == 0
        assert "wait_outv(" in result.output
        assert "obligation (division)" in result.output

    def test_parallel_program_rejected(self, program):
        result = runner.invoke(app, ["spec", str(program("ch!1 ||[ch] ch?x"))])
        assert result.exit_code == EXIT_ERROR


class TestExec:
    def test_prints_trace_and_final_state(self, program):
        path = program("x := 2; <x_dot = 1 & x < 5>; ch!x")
        result = runner.invoke(app, ["exec", str(path), "--set", "x=0", "--seed", "3"])
        assert result.exit_code == 0
        first = json.loads(result.output.splitlines()[0])
        assert first["kind"] == "cont"
        assert "final state: x = 5" in result.output

    def test_schedule_round_trip(self, program, tmp_path):
        path = program("x := 1 $ x := 2")
        saved = tmp_path / "schedule.json"
        first = runner.invoke(app, ["exec", str(path), "-s", "x=0", "--save-schedule", str(saved)])
        assert first.exit_code == 0
        replay = runner.invoke(app, ["exec", str(path), "-s", "x=0", "--schedule", str(saved)])
        assert replay.exit_code == 0
        assert replay.output == first.output

    def test_bad_assignment(self, program):
        result = runner.invoke(app, ["exec", str(program("skip")), "--set", "x"])
        assert result.exit_code == EXIT_ERROR
        assert "Expected NAME=VALUE" in result.output


class TestVerify:
    """Exit codes of ``verify``."""

    @pytest.fixture
    def job_path(self, tmp_path):
        """Write a two-process job file."""
        path = tmp_path / "job.json"
        path.write_text(
            json.dumps(
                {
                    "name": "handshake",
                    "processes": {"A": "ch!x", "B": "ch?y"},
                    "parallel": {"left": "A", "chans": ["ch"], "right": "B"},
                    "goal": "By == Ax",
                }
            )
        )
        return path

    def test_real_run(self, job_path, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(app, ["verify", str(job_path), "-o", str(out), "--oracle", "3"])
        assert result.exit_code == EXIT_OK, result.output
        assert (out / "report.txt").exists()
        assert "Oracle: 3 passed" in (out / "report.txt").read_text()

    @pytest.mark.parametrize(
        "failed_obligation, counterexample, expected",
        [
            (False, False, EXIT_OK),
            (True, False, EXIT_OBLIGATION_FAILED),
            (True, True, EXIT_COUNTEREXAMPLE),
        ],
    )
    def test_exit_codes(self, job_path, tmp_path, failed_obligation, counterexample, expected):
        with patch("hcsp_tools.cli.VerificationService.verify") as verify:
            verify.return_value = report(failed_obligation, counterexample)
            result = runner.invoke(app, ["verify", str(job_path), "-o", str(tmp_path / "out")])
        assert result.exit_code == expected

    def test_options_override_job(self, job_path, tmp_path):
        with patch("hcsp_tools.cli.VerificationService.verify") as verify:
            verify.return_value = report()
            runner.invoke(app, ["verify", str(job_path), "--seed", "9", "--unroll", "2"])
        kwargs = verify.call_args.kwargs
        assert kwargs["seed"] == 9
        assert kwargs["unroll"] == 2
        assert kwargs["oracle"] == 0
        assert kwargs["smt"] is None

    def test_invalid_job(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"processes": {}, "parallel": "A"}')
        result = runner.invoke(app, ["verify", str(path)])
        assert result.exit_code == EXIT_ERROR
        assert "Invalid job file" in result.output
