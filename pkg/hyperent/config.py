import os
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="HYPERENT_", env_file=".env", extra="ignore")

    # Numerical tolerances
    normalization_tolerance: float = 1e-12
    probability_tolerance: float = 1e-9
    unitarity_tolerance: float = 1e-10
    zero_branch_threshold: float = 1e-12

    # Exact vectors only; roughly 14 two-level subsystems
    max_state_dimension: int = 2 ** 14

    # Run defaults
    default_seed: int = 0
    default_trials: int = 100_000
    output_format: str = "json"

    # Logging
    log_level: str = os.getenv("LOG_LEVEL", "INFO")
    log_file: Optional[str] = None


settings = Settings()
