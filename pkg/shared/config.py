"""
Configuration management for the ball-bearing library and CLI.
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults and run controls loaded from environment variables."""

    # Run controls
    tol: float = 1e-10           # integrator tolerance
    t_final: float = 100.0
    samples: int = 201           # output samples per trajectory
    seed: int = 0
    workers: int = 4             # sweep worker cap

    # Output configuration
    output_dir: str = "./output"
    log_level: str = "INFO"

    # Tolerances
    skew_tolerance: float = 1e-12
    unit_tolerance: float = 1e-9
    constraint_tolerance: float = 1e-10
    degeneracy_ratio: float = 1e-12      # det threshold relative to the diagonal product
    detection_tolerance: float = 1e-12   # eps = -1 and B = C detection
    nullspace_tolerance: float = 1e-10
    certify_threshold: float = 1e-6

    # Integrator limits
    max_steps: int = 1_000_000
    min_step: float = 1e-14

    model_config = SettingsConfigDict(
        env_prefix="BEARING_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


def get_settings() -> Settings:
    """Get application settings instance."""
    return Settings()


# Global settings instance
settings = get_settings()
