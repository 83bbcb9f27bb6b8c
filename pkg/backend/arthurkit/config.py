import logging
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

"""
Configuration management for arthurkit.
Loads ARTHURKIT_* environment variables (and an optional .env file).
"""

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ARTHURKIT_",
        case_sensitive=False,
        extra="allow",
    )

    # Application Configuration
    version: str = "0.4.0"
    debug: bool = False
    log_level: str = "INFO"

    # Search Configuration
    node_budget: int = 200_000  # Canonical nodes per BFS before BudgetExceededError
    placement_budget: int = 720  # Admissible row orders tried per E^{ρ,+} rebuild
    threads: int = 1  # Worker threads for independent enumerations
    seed: int = 0  # Only feeds sampling diagnostics, never verdicts

    # Data Configuration
    fixtures: str = str(Path(__file__).resolve().parents[2] / "fixtures")
    oracle_file: str = ""  # Optional JSON wall table for the reducibility oracle

    # Output Configuration
    symbol_ascii: bool = False  # Print < + - > instead of the matrix glyphs

    # Monitoring & Observability
    sentry_dsn: str = ""
    sentry_traces_sample_rate: float = 0.1
    enable_prometheus: bool = True

    # API Configuration
    api_host: str = "0.0.0.0"
    api_port: int = 8000

    @property
    def fixtures_path(self) -> Path:
        """Fixture root as a Path."""
        return Path(self.fixtures)

    def model_post_init(self, __context):
        """Validate settings after initialization."""
        if self.node_budget < 1:
            raise ValueError("ARTHURKIT_NODE_BUDGET must be at least 1")
        if self.placement_budget < 1:
            raise ValueError("ARTHURKIT_PLACEMENT_BUDGET must be at least 1")
        if self.threads < 1:
            raise ValueError("ARTHURKIT_THREADS must be at least 1")

        if not self.fixtures_path.is_dir():
            logger.warning(
                "Fixture directory %s does not exist; fixture-based commands will fail",
                self.fixtures,
            )

        if self.oracle_file and not Path(self.oracle_file).is_file():
            logger.warning("Oracle wall table %s not found", self.oracle_file)


# Global settings instance
settings = Settings()
