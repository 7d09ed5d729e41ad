"""HCSP Tools - trace-based specifications and verification for hybrid CSP."""

__version__ = "0.1.0"

from .config import Settings, load_settings
from .generator.spec_of import NameSupply, SpecGenerator, generate
from .lang.parser import parse, parse_bexpr, parse_expr
from .lang.printer import pretty
from .semantics.interpreter import execute, execute_parallel
from .semantics.satisfaction import satisfies
from .sync.engine import SyncResult, synchronize
from .sync.naming import NamedAssertion, prefix_process
from .verify.job import VerificationJob, compile_job, load_job_file
from .verify.service import VerificationService

__all__ = [
    "Settings",
    "load_settings",
    "NameSupply",
    "SpecGenerator",
    "generate",
    "parse",
    "parse_bexpr",
    "parse_expr",
    "pretty",
    "execute",
    "execute_parallel",
    "satisfies",
    "SyncResult",
    "synchronize",
    "NamedAssertion",
    "prefix_process",
    "VerificationJob",
    "compile_job",
    "load_job_file",
    "VerificationService",
]
