"""Application settings and configuration management."""

import math
from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    app_name: str = "SyMPLER Lab"
    app_version: str = "1.0.0"
    debug: bool = False
    log_level: str = "INFO"

    # API Configuration
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    api_prefix: str = "/api/v1"

    # Data paths
    data_dir: Path = Path(__file__).resolve().parent.parent / "data"
    demo_stream_file: str = "two_regime_demo.csv"

    # Learner defaults
    default_lambda: float = 1e-6
    default_eta: float = 0.01
    default_sigma: float = 1.0

    # Pendulum defaults
    pendulum_rod: float = 0.5
    pendulum_g: float = 9.81
    pendulum_rate_hz: float = 200.0
    pendulum_theta0: float = math.pi / 2

    # Runs
    default_seed: int = 0
    default_jobs: int = 1

    # CORS settings
    cors_origins: list[str] = ["*"]
    cors_allow_credentials: bool = True
    cors_allow_methods: list[str] = ["*"]
    cors_allow_headers: list[str] = ["*"]

    @property
    def demo_stream_path(self) -> Path:
        """Full path to the bundled two-regime demo stream."""
        return self.data_dir / self.demo_stream_file

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
