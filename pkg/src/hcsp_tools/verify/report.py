"""Writing verification outputs: SMT-LIB files, index, statistics and the text report."""

from __future__ import annotations

import json
import logging
from collections import Counter
from pathlib import Path

from ..models import ObligationRecord, VerificationReport
from ..obligations import Obligation
from ..symbolic.printer import pretty_bexpr

logger = logging.getLogger(__name__)

OBLIGATIONS_DIR = "obligations"


def obligation_filename(index: int, obligation: Obligation) -> str:
    return f"{OBLIGATIONS_DIR}/{index:03d}-{obligation.origin}.smt2"


def write_obligations(out_dir: Path, obligations: list[Obligation]) -> list[ObligationRecord]:
    """One SMT-LIB file per obligation; ``unsat`` means the implication is valid."""
    (out_dir / OBLIGATIONS_DIR).mkdir(parents=True, exist_ok=True)
    records = []
    for index, obligation in enumerate(obligations, start=1):
        name = obligation_filename(index, obligation)
        (out_dir / name).write_text(obligation.script().render())
        records.append(
            ObligationRecord(
                file=name,
                origin=obligation.origin,
                hypothesis=pretty_bexpr(obligation.hyp),
                goal=pretty_bexpr(obligation.goal),
                note=obligation.note,
                mandatory=obligation.origin != "undecided-guard",
            )
        )
    logger.info(f"Wrote {len(records)} obligations to {out_dir / OBLIGATIONS_DIR}")
    return records


def stats(report: VerificationReport) -> dict:
    by_status = Counter(o.status for o in report.obligations)
    by_origin = Counter(o.origin for o in report.obligations)
    result: dict = {
        "branches": [b.model_dump(mode="json") for b in report.branch_stats],
        "decisions": report.decisions,
        "obligations": {
            "total": len(report.obligations),
            "by_status": dict(sorted(by_status.items())),
            "by_origin": dict(sorted(by_origin.items())),
        },
    }
    if report.oracle is not None:
        result["oracle"] = report.oracle.model_dump(mode="json", exclude={"counterexamples"})
    return result


def render_text(report: VerificationReport) -> str:
    lines = [f"Job: {report.job}", ""]
    for name, spec in report.process_specs.items():
        lines += [f"Process {name}:", f"  {spec}", ""]
    lines += ["Synchronized assertion:", f"  {report.assertion}", ""]

    if report.branch_stats:
        lines.append("Loop branches (generated / pruned / kept):")
        for b in report.branch_stats:
            lines.append(f"  {b.rec}: {b.generated} / {b.pruned} / {b.kept}")
        lines.append("")

    lines.append(f"Obligations ({len(report.obligations)}):")
    for o in report.obligations:
        optional = "" if o.mandatory else ", optional"
        lines.append(f"  [{o.status}{optional}] {o.file} ({o.origin})")
        lines.append(f"    {o.hypothesis} → {o.goal}")
    lines.append("")

    if report.oracle is not None:
        oracle = report.oracle
        lines.append(
            f"Oracle: {oracle.passed} passed, {oracle.failed} failed, "
            f"{oracle.skipped} skipped of {oracle.samples}"
        )
        for case in oracle.counterexamples:
            lines.append(f"  counterexample #{case.index} (seed {case.seed}): {case.reason}")
            lines.append(f"    initial state: {case.initial_state}")
            if case.assertion_path:
                lines.append(f"    assertion path: {' > '.join(case.assertion_path)}")
            for event in case.trace:
                lines.append(f"    {event.model_dump_json()}")
    return "\n".join(lines) + "\n"


def write_report(out_dir: Path, report: VerificationReport) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    index = [o.model_dump(mode="json") for o in report.obligations]
    (out_dir / "index.json").write_text(json.dumps(index, indent=2) + "\n")
    (out_dir / "stats.json").write_text(json.dumps(stats(report), indent=2) + "\n")
    (out_dir / "report.txt").write_text(render_text(report))
    logger.info(f"Wrote report to {out_dir}")
