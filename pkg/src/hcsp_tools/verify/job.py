"""Turning a job file into parsed processes, conditions and a composition."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ..exceptions import HcspSyntaxError, JobError
from ..lang.analysis import channels, rename_process
from ..lang.ast import Parallel, Process, is_sequential
from ..lang.parser import parse, parse_bexpr
from ..models import JobFile, JobOptions, ParallelNode, load_job
from ..symbolic.expr import BExpr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerificationJob:
    """A parsed job; process variables are not yet prefixed."""

    name: str
    processes: dict[str, Process]
    tree: ParallelNode | str
    init_cond: BExpr
    rec_cond: BExpr
    goal: BExpr | None
    initial_ranges: dict[str, tuple[Fraction, Fraction]]
    options: JobOptions

    def composition(self) -> Process:
        """The whole system with every variable ``x`` of process ``A`` renamed ``Ax``."""
        return _compose(self.tree, self.processes)


def _compose(node: ParallelNode | str, processes: dict[str, Process]) -> Process:
    if isinstance(node, str):
        return rename_process(processes[node], node)
    return Parallel(
        _compose(node.left, processes), frozenset(node.chans), _compose(node.right, processes)
    )


def _parse_cond(text: str, field: str) -> BExpr:
    try:
        return parse_bexpr(text)
    except HcspSyntaxError as e:
        raise JobError(f"{field}: {e}") from e


def compile_job(job: JobFile) -> VerificationJob:
    processes: dict[str, Process] = {}
    for name, text in job.processes.items():
        try:
            p = parse(text)
        except HcspSyntaxError as e:
            raise JobError(f"process {name}: {e}") from e
        if not is_sequential(p):
            raise JobError(f"process {name} must be sequential; compose it in 'parallel'")
        processes[name] = p
    if not isinstance(job.parallel, str):
        _check_channels(job.parallel, processes)
    return VerificationJob(
        name=job.name,
        processes=processes,
        tree=job.parallel,
        init_cond=_parse_cond(job.init_cond, "init_cond"),
        rec_cond=_parse_cond(job.rec_cond, "rec_cond"),
        goal=_parse_cond(job.goal, "goal") if job.goal else None,
        initial_ranges={
            var: (Fraction(lo).limit_denominator(1000), Fraction(hi).limit_denominator(1000))
            for var, (lo, hi) in job.initial_ranges.items()
        },
        options=job.options,
    )


def _check_channels(node: ParallelNode, processes: dict[str, Process]) -> frozenset[str]:
    """Shared channels must be used on both sides; returns the channels below ``node``."""
    sides = []
    for side in (node.left, node.right):
        if isinstance(side, str):
            sides.append(channels(processes[side]))
        else:
            sides.append(_check_channels(side, processes))
    for ch in node.chans:
        if ch not in sides[0] or ch not in sides[1]:
            raise JobError(f"shared channel {ch} is not used on both sides of a composition")
    return sides[0] | sides[1]


def load_job_file(path: Path) -> VerificationJob:
    try:
        text = path.read_text()
    except OSError as e:
        raise JobError(f"Cannot read job file {path}: {e}") from e
    job = compile_job(load_job(text))
    logger.info(f"Loaded job {job.name} with processes {', '.join(job.processes)}")
    return job
