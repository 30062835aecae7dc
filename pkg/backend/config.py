from pydantic_settings import BaseSettings
import os


class Settings(BaseSettings):
    # Path enumeration
    enumeration_cap: int = 25
    exact_max_steps: int = 12
    binomial_exact_max_steps: int = 60

    # Lattice tolerances
    strike_rel_tol: float = 1e-9
    recombining_tol: float = 1e-12

    # Monte Carlo
    mc_paths: int = 100_000
    mc_chunk_size: int = 65_536
    seed: int = 0
    max_workers: int = 4

    # Output and logging
    significant_digits: int = 10
    log_level: str = "WARNING"
    log_json: bool = False

    class Config:
        env_file = ".env"
        env_prefix = "LATTICE_"
        case_sensitive = False


# Create settings instance
settings = Settings()


def validate_settings():
    """Validate that all numeric settings are in range"""
    bad_fields = []
    for field in (
        "enumeration_cap",
        "exact_max_steps",
        "binomial_exact_max_steps",
        "mc_paths",
        "mc_chunk_size",
        "max_workers",
        "significant_digits",
    ):
        if getattr(settings, field) < 1:
            bad_fields.append(field)

    if not 0 < settings.strike_rel_tol < 1e-3:
        bad_fields.append("strike_rel_tol")
    if not 0 < settings.recombining_tol < 1e-6:
        bad_fields.append("recombining_tol")
    if settings.exact_max_steps > settings.enumeration_cap:
        bad_fields.append("exact_max_steps")

    if bad_fields:
        raise ValueError(f"Invalid settings: {', '.join(bad_fields)}")


# Validate on import (only in production)
if os.getenv("ENVIRONMENT") == "production":
    validate_settings()
