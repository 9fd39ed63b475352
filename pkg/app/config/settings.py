"""
Configuration settings for the cancellation-formula verifier.

Every field can be overridden from the environment (or a ``.env`` file)
with the ``CANCEL_`` prefix, e.g. ``CANCEL_K=2`` or
``CANCEL_TAU_SAMPLES='["0.3+1.1i"]'``. Command-line flags take precedence
over both; see ``app.models.config.Config``.
"""
from typing import List, Optional
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

ALL_SUITES = ["ring", "theta", "charforms", "cancel", "lambda", "localize"]


class Settings(BaseSettings):
    """Verifier defaults."""

    model_config = SettingsConfigDict(env_prefix="CANCEL_", extra="ignore")

    # Geometry
    k: int = Field(default=1, description="Dimension parameter: dim M = 8k+4 or 8k")
    family: str = Field(default="8k+4", description="Dimension family, '8k+4' or '8k'")
    l: int = Field(default=3, description="Half rank of the auxiliary bundle V")

    # Truncation orders
    q_order: int = Field(default=6, description="Retained order in units of q^(1/2)")
    taylor_order: Optional[int] = Field(default=None, description="Taylor bound Z; defaults to dim/2 + 2")
    theta_q_order: int = Field(default=20, description="Integer q-order for theta and modular-form expansions")

    # Numeric checks
    tolerance: float = Field(default=1e-8, description="Relative tolerance of numeric checks")
    tau_samples: List[str] = Field(
        default_factory=lambda: ["0.37+1.29i", "-0.2+0.9i"],
        description="Sample points in the upper half plane"
    )
    seed: int = Field(default=0, description="Seed for random samples")

    # Run selection and outputs
    suites: List[str] = Field(default_factory=lambda: list(ALL_SUITES), description="Suites to run")
    golden_dir: Optional[str] = Field(default=None, description="Directory of golden expansion files")
    emit_golden: bool = Field(default=False, description="Write golden files instead of comparing")
    out_path: str = Field(default="report.json", description="Where the JSON report is written")
    workers: int = Field(default=4, description="Thread pool size for concurrent suites")

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[str] = Field(default=None, description="Optional log file path")


def get_settings() -> Settings:
    """Get verifier settings."""
    return Settings()
