"""Configuration management for HCSP Tools."""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigurationError


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="HCSP_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # External solver
    smt_command: str | None = None  # e.g. "z3 -smt2"; unset leaves obligations unchecked
    smt_timeout: float = 30.0  # seconds per obligation

    # Branch pruning
    prune_with_z3: bool = True
    prune_timeout_ms: int = 5000

    # Oracle
    oracle_samples: int = 0
    oracle_workers: int = 8
    oracle_seed: int = 0
    unroll: int = 1  # loop iterations per oracle run

    # Satisfaction checking
    rec_unfold_slack: int = 4  # extra recursion unfoldings beyond the trace length

    # Output
    output_dir: Path = Path("hcsp-out")


def load_settings(**overrides) -> Settings:
    """Load application settings from environment variables."""
    try:
        return Settings(**overrides)
    except Exception as e:
        raise ConfigurationError(
            f"Failed to load settings. Check the HCSP_* environment variables "
            f"and your .env file.\n"
            f"Error: {e}"
        ) from e
