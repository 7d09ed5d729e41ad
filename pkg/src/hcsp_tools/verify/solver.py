"""Running an external SMT-LIB solver on exported obligations."""

from __future__ import annotations

import logging
import shlex
import subprocess
from pathlib import Path

from ..exceptions import SolverError
from ..models import ObligationStatus

logger = logging.getLogger(__name__)


class SmtSolver:
    """A solver command line; the script path is appended as the last argument."""

    def __init__(self, command: str, timeout: float = 30.0):
        self.argv = shlex.split(command)
        if not self.argv:
            raise SolverError("Empty SMT solver command")
        self.timeout = timeout

    def check(self, script: Path) -> tuple[ObligationStatus, str]:
        """``unsat`` discharges the obligation, ``sat`` refutes it."""
        try:
            result = subprocess.run(
                [*self.argv, str(script)],
                capture_output=True,
                text=True,
                timeout=self.timeout,
                check=False,
            )
        except FileNotFoundError as e:
            raise SolverError(f"SMT solver not found: {self.argv[0]}") from e
        except subprocess.TimeoutExpired:
            logger.warning(f"Solver timed out after {self.timeout}s on {script.name}")
            return "unknown", "timeout"

        output = (result.stdout or "").strip()
        answer = output.splitlines()[0].strip() if output else ""
        logger.debug(f"{script.name}: {answer or result.stderr.strip()}")
        if answer == "unsat":
            return "discharged", answer
        if answer == "sat":
            return "failed", answer
        return "unknown", answer or (result.stderr or "").strip()
