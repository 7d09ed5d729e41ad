"""Pydantic models for jobs, reports and serialized traces."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Annotated, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from .exceptions import JobError
from .lang.parser import parse_expr
from .semantics.trace import DEADLOCK, CommEvent, ContEvent, Deadlock, Event, Trace, canonical
from .symbolic.expr import TIME, Var, substitute
from .symbolic.printer import format_fraction, pretty_expr

# ============================================================================
# Job Models
# ============================================================================


class ParallelNode(BaseModel):
    """``left ||[chans] right``; leaves name processes of the job."""

    left: ParallelNode | str
    chans: list[str] = Field(default_factory=list)
    right: ParallelNode | str

    def leaves(self) -> list[str]:
        names: list[str] = []
        for side in (self.left, self.right):
            names.extend([side] if isinstance(side, str) else side.leaves())
        return names


class JobOptions(BaseModel):
    """Per-job overrides of the settings; command-line flags take precedence."""

    oracle: int | None = Field(default=None, ge=0)
    seed: int | None = None
    smt: str | None = None
    unroll: int | None = Field(default=None, ge=0)


class JobFile(BaseModel):
    """A verification job: named processes, their composition and conditions."""

    name: str = "job"
    processes: dict[str, str]
    parallel: ParallelNode | str
    init_cond: str = "true"
    rec_cond: str = "true"
    goal: str | None = None
    initial_ranges: dict[str, tuple[float, float]] = Field(default_factory=dict)
    options: JobOptions = Field(default_factory=JobOptions)

    @field_validator("processes")
    @classmethod
    def _names_are_prefixes(cls, processes: dict[str, str]) -> dict[str, str]:
        if not processes:
            raise ValueError("a job needs at least one process")
        for name in processes:
            if not name.isidentifier():
                raise ValueError(f"process name {name!r} is not an identifier")
        return processes

    @field_validator("initial_ranges")
    @classmethod
    def _ranges_ordered(
        cls, ranges: dict[str, tuple[float, float]]
    ) -> dict[str, tuple[float, float]]:
        for var, (lo, hi) in ranges.items():
            if lo > hi:
                raise ValueError(f"empty range for {var}: [{lo}, {hi}]")
        return ranges

    @model_validator(mode="after")
    def _leaves_match_processes(self) -> JobFile:
        leaves = [self.parallel] if isinstance(self.parallel, str) else self.parallel.leaves()
        unknown = [name for name in leaves if name not in self.processes]
        if unknown:
            raise ValueError(f"composition names unknown processes: {', '.join(unknown)}")
        if len(set(leaves)) != len(leaves):
            raise ValueError("a process appears twice in the composition")
        return self


def load_job(text: str) -> JobFile:
    try:
        return JobFile.model_validate_json(text)
    except ValueError as e:
        raise JobError(f"Invalid job file:\n{e}") from e


# ============================================================================
# Report Models
# ============================================================================

ObligationStatus = Literal["unchecked", "discharged", "failed", "unknown"]


class ObligationRecord(BaseModel):
    """One obligation as listed in ``index.json``."""

    file: str
    origin: str
    hypothesis: str
    goal: str
    note: str = ""
    mandatory: bool = True  # undecided guards only cost precision when they fail
    status: ObligationStatus = "unchecked"
    solver_output: str | None = None


class BranchStats(BaseModel):
    """Disjunctive leaves of one synchronized loop body."""

    rec: str
    generated: int
    pruned: int
    kept: int


class OracleCase(BaseModel):
    """One random parallel execution checked against the final assertion."""

    index: int
    seed: int
    outcome: Literal["pass", "fail", "skipped"]
    initial_state: dict[str, str] = Field(default_factory=dict)
    reason: str = ""
    trace: list[EventRecord] = Field(default_factory=list)
    # Disjuncts, loop unfoldings and branches leading to the closest failure.
    assertion_path: list[str] = Field(default_factory=list)


class OracleSummary(BaseModel):
    samples: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    counterexamples: list[OracleCase] = Field(default_factory=list)


class VerificationReport(BaseModel):
    """Everything ``verify`` writes out besides the SMT-LIB files."""

    job: str
    process_specs: dict[str, str] = Field(default_factory=dict)
    assertion: str = ""
    obligations: list[ObligationRecord] = Field(default_factory=list)
    branch_stats: list[BranchStats] = Field(default_factory=list)
    decisions: dict[str, int] = Field(default_factory=dict)
    oracle: OracleSummary | None = None

    @property
    def failed_obligations(self) -> list[ObligationRecord]:
        return [o for o in self.obligations if o.mandatory and o.status == "failed"]


# ============================================================================
# Trace Records
# ============================================================================


class CommRecord(BaseModel):
    kind: Literal["comm"] = "comm"
    ch: str
    direction: Literal["?", "!"] | None = None
    value: str


class ContRecord(BaseModel):
    """A continuous block; ``path`` maps variables to expressions over ``t``."""

    kind: Literal["cont"] = "cont"
    duration: str
    path: dict[str, str]
    rdy: list[str] = Field(default_factory=list)


class DeadlockRecord(BaseModel):
    kind: Literal["deadlock"] = "deadlock"


EventRecord = Annotated[CommRecord | ContRecord | DeadlockRecord, Field(discriminator="kind")]


def event_record(event: Event) -> CommRecord | ContRecord | DeadlockRecord:
    match event:
        case CommEvent(ch, direction, value):
            return CommRecord(ch=ch, direction=direction, value=format_fraction(value))
        case ContEvent(duration, path, rdy):
            return ContRecord(
                duration=format_fraction(duration),
                path={name: pretty_expr(e, "code") for name, e in path},
                rdy=sorted(f"{ch}{direction}" for ch, direction in rdy),
            )
        case Deadlock():
            return DeadlockRecord()
    raise TypeError(f"not an event: {event!r}")


def event_from_record(record: CommRecord | ContRecord | DeadlockRecord) -> Event:
    match record:
        case CommRecord():
            return CommEvent(record.ch, record.direction, Fraction(record.value))
        case ContRecord():
            path = tuple(
                (name, canonical(substitute(parse_expr(text), Var("t"), TIME)))
                for name, text in record.path.items()
            )
            rdy = frozenset((head[:-1], head[-1]) for head in record.rdy)
            return ContEvent(Fraction(record.duration), path, rdy)  # type: ignore[arg-type]
    return DEADLOCK


class _Line(BaseModel):
    event: EventRecord


def trace_to_jsonl(tr: Trace) -> str:
    return "".join(event_record(e).model_dump_json() + "\n" for e in tr)


def trace_from_jsonl(text: str) -> Trace:
    events = []
    for line in text.splitlines():
        if line.strip():
            record = _Line.model_validate({"event": json.loads(line)}).event
            events.append(event_from_record(record))
    return tuple(events)


OracleCase.model_rebuild()
