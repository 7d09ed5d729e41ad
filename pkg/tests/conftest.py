"""Shared fixtures for HCSP Tools tests."""

from importlib.resources import files
from pathlib import Path

import pytest
from faker import Faker

from hcsp_tools.config import Settings
from hcsp_tools.verify.job import VerificationJob, load_job_file


@pytest.fixture
def fake():
    """Create a seeded faker so random cases are reproducible."""
    f = Faker()
    f.seed_instance(1234)
    return f


@pytest.fixture
def settings(tmp_path):
    """Create settings writing into a temporary directory, without z3 timeouts."""
    return Settings(
        _env_file=None,
        output_dir=tmp_path / "out",
        oracle_workers=1,
        prune_timeout_ms=20000,
    )


@pytest.fixture
def cruise_job_path() -> Path:
    """Path of the bundled cruise-control job."""
    return Path(str(files("hcsp_tools") / "jobs" / "cruise_control.json"))


@pytest.fixture
def cruise_job(cruise_job_path) -> VerificationJob:
    """The bundled cruise-control job, parsed."""
    return load_job_file(cruise_job_path)
