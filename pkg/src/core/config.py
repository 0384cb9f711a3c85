"""
Configuration management for dapkit
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Literal


class Settings(BaseSettings):
    """Toolkit settings loaded from DAPKIT_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="DAPKIT_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    TOOL_VERSION: str = "1.0.0"

    # Input databases
    CONFIG: str = "data/materials.example"
    VIBRONIC_CONFIG: str = "data/vibronic.example"
    DATA_DIR: str = "data"
    DEFAULT_HOST: str = "3C-SiC"

    # Runtime
    LOG_LEVEL: str = "INFO"
    THREADS: int = 1
    SIGNIFICANT_DIGITS: int = 9

    # Lattice enumeration
    SHELL_TOLERANCE: float = 1e-6  # fraction of a0
    SHELL_RMAX_CELLS: float = 50.0

    # Franck-Condon / lineshape
    FC_LEVEL_CAP: int = 200
    FC_WEIGHT_TOLERANCE: float = 1e-8
    CAPTURE_THRESHOLD: float = 0.999
    ZPL_GAMMA_MEV: float = 3.0
    SIDEBAND_SIGMA_MEV: float = 30.0
    TEMPERATURE_K: float = 5.0
    GRID_STEP_MEV: float = 1.0

    # Response
    LIFETIME_CONVENTION: Literal["as-printed", "standard-3pi-eps0-hbar"] = "as-printed"

    # Test-only Monte Carlo oracle
    MC_SEED: int = 20240106


# Global settings instance
settings = Settings()
