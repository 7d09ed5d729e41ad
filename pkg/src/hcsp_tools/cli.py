"""CLI for HCSP Tools."""

import logging
import sys
from fractions import Fraction
from pathlib import Path

import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .assertions.printer import pretty_assertion
from .config import load_settings
from .exceptions import HcspToolsError
from .generator.spec_of import generate
from .lang.parser import parse
from .lang.printer import pretty
from .models import VerificationReport, trace_to_jsonl
from .semantics.interpreter import execute
from .semantics.sampling import random_schedule
from .semantics.schedule import Schedule
from .symbolic.evaluate import State
from .symbolic.printer import format_fraction
from .verify.job import load_job_file
from .verify.service import VerificationService

app = typer.Typer(
    name="hcsp-tools",
    help="Trace-based specifications, synchronization and oracle checks for HCSP",
)

console = Console()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_OBLIGATION_FAILED = 2
EXIT_COUNTEREXAMPLE = 3


def setup_logging(verbose: bool = False):
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    # Solver libraries are noisy at INFO
    for name in ("z3", "sympy"):
        logging.getLogger(name).setLevel(logging.DEBUG if verbose else logging.WARNING)


def _read_program(path: Path):
    try:
        return parse(path.read_text())
    except OSError as e:
        raise HcspToolsError(f"Cannot read {path}: {e}") from e


def _fail(e: Exception, verbose: bool):
    console.print(f"\n[bold red]Error:[/bold red] {escape(str(e))}")
    if verbose:
        raise e
    sys.exit(EXIT_ERROR)


def exit_code(report: VerificationReport) -> int:
    if report.oracle is not None and report.oracle.failed:
        return EXIT_COUNTEREXAMPLE
    if report.failed_obligations:
        return EXIT_OBLIGATION_FAILED
    return EXIT_OK


def display_report(report: VerificationReport, out_dir: Path):
    """Summarize a verification run on the console."""
    console.print("\n[bold]Synchronized assertion:[/bold]")
    console.print(report.assertion, markup=False, highlight=False)

    if report.branch_stats:
        table = Table(title="Loop Branches", show_header=True, header_style="bold magenta")
        table.add_column("Loop", style="cyan")
        table.add_column("Generated", justify="right")
        table.add_column("Pruned", justify="right")
        table.add_column("Kept", justify="right", style="green")
        for b in report.branch_stats:
            table.add_row(b.rec, str(b.generated), str(b.pruned), str(b.kept))
        console.print(table)

    table = Table(title="Obligations", show_header=True, header_style="bold magenta")
    table.add_column("File", style="dim")
    table.add_column("Origin", style="cyan")
    table.add_column("Status", justify="center")
    colours = {"discharged": "green", "failed": "red", "unknown": "yellow", "unchecked": "dim"}
    for o in report.obligations:
        status = f"[{colours[o.status]}]{o.status}[/{colours[o.status]}]"
        table.add_row(o.file, o.origin + ("" if o.mandatory else " (optional)"), status)
    console.print(table)

    if report.oracle is not None:
        oracle = report.oracle
        colour = "red" if oracle.failed else "green"
        console.print(
            f"[{colour}]Oracle: {oracle.passed} passed, {oracle.failed} failed, "
            f"{oracle.skipped} skipped of {oracle.samples}[/{colour}]"
        )

    if report.failed_obligations:
        console.print(f"[red]✗ {len(report.failed_obligations)} obligations failed[/red]")
    console.print(f"\n[dim]Outputs written to {out_dir}[/dim]")


@app.command()
def verify(
    job_path: Path = typer.Argument(..., help="Job file (JSON)"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Output directory"),
    oracle: int | None = typer.Option(None, "--oracle", help="Number of oracle runs"),
    seed: int | None = typer.Option(None, "--seed", help="Oracle random seed"),
    smt: str | None = typer.Option(None, "--smt", help="SMT solver command, e.g. 'z3 -smt2'"),
    unroll: int | None = typer.Option(None, "--unroll", help="Loop iterations per oracle run"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """
    Verify a parallel HCSP system.

    Generates the assertion of every process, synchronizes them along the
    composition, writes one SMT-LIB file per obligation and, when asked,
    checks obligations with an external solver and runs oracle spot checks.
    """
    setup_logging(verbose)

    try:
        settings = load_settings()
        job = load_job_file(job_path)
        options = job.options

        def pick(flag, option, default):
            if flag is not None:
                return flag
            return option if option is not None else default

        out_dir = out or settings.output_dir
        console.print(f"\n[bold blue]Verifying {job.name}...[/bold blue]")
        report = VerificationService(settings).verify(
            job,
            out_dir,
            oracle=pick(oracle, options.oracle, settings.oracle_samples),
            seed=pick(seed, options.seed, settings.oracle_seed),
            smt=pick(smt, options.smt, settings.smt_command),
            unroll=pick(unroll, options.unroll, settings.unroll),
        )
        display_report(report, out_dir)
    except HcspToolsError as e:
        _fail(e, verbose)

    code = exit_code(report)
    if code == EXIT_OK:
        console.print("[bold green]✓ Verification finished[/bold green]")
    sys.exit(code)


@app.command()
def spec(
    program: Path = typer.Argument(..., help="Sequential HCSP program"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """Print the generated assertion of a sequential program and its obligations."""
    setup_logging(verbose)
    try:
        result = generate(_read_program(program))
    except HcspToolsError as e:
        _fail(e, verbose)
    console.print(pretty_assertion(result.assertion), markup=False, highlight=False)
    for ob in result.obligations:
        console.print(f"[dim]obligation ({ob.origin}):[/dim] {ob}", highlight=False)


@app.command()
def fmt(
    program: Path = typer.Argument(..., help="HCSP program"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """Pretty-print a program in canonical form."""
    setup_logging(verbose)
    try:
        p = _read_program(program)
    except HcspToolsError as e:
        _fail(e, verbose)
    console.print(pretty(p), markup=False, highlight=False)


def _parse_state(assignments: list[str]) -> State:
    values: dict[str, Fraction] = {}
    for item in assignments:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise HcspToolsError(f"Expected NAME=VALUE, got {item!r}")
        try:
            values[name.strip()] = Fraction(value.strip())
        except ValueError as e:
            raise HcspToolsError(f"Not a number for {name.strip()}: {value!r}") from e
    return State(values)


@app.command("exec")
def exec_(
    program: Path = typer.Argument(..., help="Sequential HCSP program"),
    set_: list[str] = typer.Option([], "--set", "-s", help="Initial value, NAME=VALUE"),
    seed: int = typer.Option(0, "--seed", help="Random schedule seed"),
    unroll: int = typer.Option(1, "--unroll", help="Extra loop iterations allowed"),
    schedule: Path | None = typer.Option(None, "--schedule", help="Replay a schedule (JSON)"),
    save_schedule: Path | None = typer.Option(
        None, "--save-schedule", help="Write the schedule used (JSON)"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """Run a sequential program and print its trace as JSON lines."""
    setup_logging(verbose)
    try:
        p = _read_program(program)
        s0 = _parse_state(set_)
        if schedule is not None:
            sched = Schedule.from_json(schedule.read_text())
            final, trace = execute(p, s0, sched)
        else:
            sched, final, trace = random_schedule(p, s0, seed, unroll)
        if save_schedule is not None:
            save_schedule.write_text(sched.to_json() + "\n")
    except (HcspToolsError, OSError) as e:
        _fail(e, verbose)
    sys.stdout.write(trace_to_jsonl(trace))
    state = ", ".join(f"{k} = {format_fraction(v)}" for k, v in sorted(final.items()))
    console.print(f"[dim]final state:[/dim] {state}", highlight=False)


if __name__ == "__main__":
    app()
