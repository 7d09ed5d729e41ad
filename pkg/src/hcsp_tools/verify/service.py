"""Service layer composing generation, synchronization, solving and oracle checks."""

from __future__ import annotations

import logging
import time
from pathlib import Path

from ..assertions.assn import leaf_count
from ..assertions.printer import pretty_assertion
from ..config import Settings
from ..generator.spec_of import NameSupply, generate
from ..lang.analysis import free_vars
from ..models import OracleSummary, ParallelNode, VerificationReport
from ..obligations import Obligation, ObligationLog
from ..symbolic.expr import program_vars, rename_vars
from ..sync.decide import GuardDecider
from ..sync.engine import SyncResult, synchronize
from ..sync.naming import NamedAssertion, prefix_process
from .job import VerificationJob
from .oracle import OracleChecker
from .report import write_obligations, write_report
from .solver import SmtSolver

logger = logging.getLogger(__name__)


class VerificationService:
    """Runs a verification job end to end."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.decider = GuardDecider(
            use_z3=settings.prune_with_z3, timeout_ms=settings.prune_timeout_ms
        )

    def generate(self, job: VerificationJob) -> tuple[dict[str, NamedAssertion], list[Obligation]]:
        """Prefixed assertions of every process, sharing one name supply."""
        names = NameSupply()
        log = ObligationLog()
        named: dict[str, NamedAssertion] = {}
        for name, p in job.processes.items():
            result = generate(p, names)
            named[name] = prefix_process(name, result.assertion, taken=list(named))

            def prefix(x: str, name: str = name) -> str:
                return name + x

            for ob in result.obligations:
                note = f"{name}: {ob.note}" if ob.note else name
                log.add(rename_vars(ob.goal, prefix), ob.origin, rename_vars(ob.hyp, prefix), note)
            logger.info(
                f"Generated assertion for {name} with {leaf_count(result.assertion)} branches"
            )
        return named, list(log)

    def synchronize(
        self,
        job: VerificationJob,
        named: dict[str, NamedAssertion],
        *,
        mutation: str | None = None,
    ) -> SyncResult:
        """Synchronize bottom-up along the composition tree; the goal is checked at the root."""

        def walk(node: ParallelNode | str, root: bool) -> SyncResult:
            if isinstance(node, str):
                return SyncResult(named[node])
            left, right = walk(node.left, False), walk(node.right, False)
            result = synchronize(
                node.chans,
                left.named,
                right.named,
                job.init_cond,
                job.rec_cond,
                goal=job.goal if root else None,
                decider=self.decider,
                mutation=mutation,
            )
            return SyncResult(
                result.named,
                [*left.obligations, *right.obligations, *result.obligations],
                [*left.branch_stats, *right.branch_stats, *result.branch_stats],
            )

        return walk(job.tree, True)

    def check_oracle(
        self, job: VerificationJob, synced: SyncResult, samples: int, seed: int, unroll: int
    ) -> OracleSummary:
        pc = job.composition()
        checker = OracleChecker(
            pc,
            synced.assertion,
            job.init_cond,
            free_vars(pc) | program_vars(job.init_cond),
            job.initial_ranges,
            unroll=unroll,
            rec_unfold_slack=self.settings.rec_unfold_slack,
        )
        return checker.run(samples, seed, self.settings.oracle_workers)

    def verify(
        self,
        job: VerificationJob,
        out_dir: Path,
        *,
        oracle: int = 0,
        seed: int = 0,
        smt: str | None = None,
        unroll: int = 1,
    ) -> VerificationReport:
        start = time.perf_counter()
        named, generated = self.generate(job)
        synced = self.synchronize(job, named)

        log = ObligationLog()
        log.extend(generated)
        log.extend(synced.obligations)
        records = write_obligations(out_dir, list(log))

        if smt:
            solver = SmtSolver(smt, self.settings.smt_timeout)
            for record in records:
                record.status, record.solver_output = solver.check(out_dir / record.file)
            discharged = sum(r.status == "discharged" for r in records)
            logger.info(f"Solver discharged {discharged} of {len(records)} obligations")

        report = VerificationReport(
            job=job.name,
            process_specs={name: pretty_assertion(n.assertion) for name, n in named.items()},
            assertion=pretty_assertion(synced.assertion),
            obligations=records,
            branch_stats=synced.branch_stats,
            decisions=self.decider.stats.as_dict(),
            oracle=self.check_oracle(job, synced, oracle, seed, unroll) if oracle > 0 else None,
        )
        write_report(out_dir, report)
        logger.info(f"Verified {job.name} in {time.perf_counter() - start:.2f}s")
        return report
