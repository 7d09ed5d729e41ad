"""Oracle spot checks: random parallel runs must satisfy the synchronized assertion."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from faker import Faker

from ..assertions.assn import Assertion
from ..exceptions import EvaluationError, HcspToolsError, SatisfactionInconclusiveError
from ..lang.ast import Process
from ..models import OracleCase, OracleSummary, event_record
from ..semantics.cosim import CoSimulation
from ..semantics.interpreter import execute_parallel_all
from ..semantics.satisfaction import check_run
from ..semantics.trace import is_deadlocked
from ..symbolic.evaluate import State, evaluate
from ..symbolic.expr import BExpr
from ..symbolic.printer import format_fraction

logger = logging.getLogger(__name__)

DEFAULT_RANGE = (Fraction(-10), Fraction(10))
GRID = 4  # initial values lie on multiples of 1/GRID
MAX_STATE_TRIES = 500

Ranges = Mapping[str, tuple[Fraction, Fraction]]


def _grid_value(fake: Faker, lo: Fraction, hi: Fraction) -> Fraction:
    low, high = math.ceil(lo * GRID), math.floor(hi * GRID)
    if low > high:
        return lo
    return Fraction(fake.random_int(low, high), GRID)


def random_state(
    variables: Iterable[str], ranges: Ranges, init_cond: BExpr, fake: Faker
) -> State | None:
    """A start state satisfying ``init_cond``, found by rejection sampling."""
    names = sorted(variables)
    for _ in range(MAX_STATE_TRIES):
        s = State(
            {var: _grid_value(fake, *ranges.get(var, DEFAULT_RANGE)) for var in names}
        )
        try:
            if evaluate(init_cond, s):
                return s
        except EvaluationError:
            continue
    return None


class OracleChecker:
    """Checks one system against its synchronized assertion on random runs."""

    def __init__(
        self,
        pc: Process,
        assertion: Assertion,
        init_cond: BExpr,
        variables: Iterable[str],
        ranges: Ranges | None = None,
        *,
        unroll: int = 1,
        rec_unfold_slack: int = 4,
    ):
        self.pc = pc
        self.assertion = assertion
        self.init_cond = init_cond
        self.variables = frozenset(variables)
        self.ranges = dict(ranges or {})
        self.unroll = unroll
        self.rec_unfold_slack = rec_unfold_slack

    def check_case(self, index: int, seed: int) -> OracleCase:
        fake = Faker()
        fake.seed_instance(seed)
        s0 = random_state(self.variables, self.ranges, self.init_cond, fake)
        if s0 is None:
            return OracleCase(
                index=index, seed=seed, outcome="skipped",
                reason="no sampled state satisfies the initial condition",
            )
        state = {k: format_fraction(v) for k, v in sorted(s0.items())}

        def skipped(reason: str) -> OracleCase:
            return OracleCase(
                index=index, seed=seed, outcome="skipped", initial_state=state, reason=reason
            )

        try:
            schedule = CoSimulation(self.pc, s0, seed, self.unroll).run()
            if schedule is None:
                return skipped("components did not all terminate")
            results = execute_parallel_all(self.pc, s0, schedule)
        except HcspToolsError as e:
            return skipped(f"execution failed: {e}")
        runs = [(s, tr) for s, tr in results if not is_deadlocked(tr)]
        if not runs:
            return skipped("every synchronization deadlocks")

        for s, tr in runs:
            try:
                verdict = check_run(
                    s0, s, tr, self.assertion, rec_unfold_slack=self.rec_unfold_slack
                )
            except SatisfactionInconclusiveError as e:
                return skipped(str(e))
            if not verdict.holds:
                failure = verdict.failure
                logger.warning(
                    f"Oracle case {index} (seed {seed}) violates the assertion at {failure}"
                )
                reason = "the run does not satisfy the synchronized assertion"
                return OracleCase(
                    index=index,
                    seed=seed,
                    outcome="fail",
                    initial_state=state,
                    reason=f"{reason}: {failure.reason}" if failure else reason,
                    trace=[event_record(e) for e in tr],
                    assertion_path=list(failure.trail) if failure else [],
                )
        return OracleCase(index=index, seed=seed, outcome="pass", initial_state=state)

    def run(self, samples: int, seed: int = 0, workers: int = 8) -> OracleSummary:
        if samples <= 0:
            return OracleSummary()
        with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
            cases = list(pool.map(lambda i: self.check_case(i, seed + i), range(samples)))
        summary = OracleSummary(
            samples=samples,
            passed=sum(c.outcome == "pass" for c in cases),
            failed=sum(c.outcome == "fail" for c in cases),
            skipped=sum(c.outcome == "skipped" for c in cases),
            counterexamples=[c for c in cases if c.outcome == "fail"],
        )
        logger.info(
            f"Oracle: {summary.passed} passed, {summary.failed} failed, "
            f"{summary.skipped} skipped of {samples}"
        )
        return summary
