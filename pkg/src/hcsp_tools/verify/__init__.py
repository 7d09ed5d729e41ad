"""Batch verification of jobs: generation, synchronization, solving and oracle checks."""

from .job import VerificationJob, compile_job, load_job_file
from .oracle import OracleChecker, random_state
from .report import render_text, write_obligations, write_report
from .service import VerificationService
from .solver import SmtSolver

__all__ = [
    "OracleChecker",
    "SmtSolver",
    "VerificationJob",
    "VerificationService",
    "compile_job",
    "load_job_file",
    "random_state",
    "render_text",
    "write_obligations",
    "write_report",
]
