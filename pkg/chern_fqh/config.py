"""
Application configuration management.

Loads settings from environment variables with sensible defaults.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env file from package directory
_PACKAGE_DIR = Path(__file__).parent
_PROJECT_ROOT = _PACKAGE_DIR.parent

# Try loading .env from multiple locations
for env_path in [_PACKAGE_DIR / ".env", _PROJECT_ROOT / ".env"]:
    if env_path.exists():
        load_dotenv(env_path)
        break

CONVENTIONS = ("series", "truncated")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError:
        return default


class Config:
    """Application configuration loaded from environment variables."""

    # ========================================
    # Paths
    # ========================================
    BASE_DIR: Path = _PACKAGE_DIR
    PROJECT_ROOT: Path = _PROJECT_ROOT
    DEFAULT_JOB_FILE: Path = _PACKAGE_DIR / "config.json"

    # ========================================
    # Brute-force pipeline
    # ========================================
    # 2gk + 2g generators; the Grassmann expansion is exponential in this number
    MAX_GENERATORS: int = _int_env("CHERN_FQH_MAX_GENERATORS", 34)
    WORKERS: int = _int_env("CHERN_FQH_WORKERS", 1)

    # ========================================
    # Linear algebra
    # ========================================
    PSD_MAX_SIZE: int = _int_env("CHERN_FQH_PSD_MAX_SIZE", 8)

    # ========================================
    # Conventions and logging
    # ========================================
    CONVENTION: str = os.getenv("CHERN_FQH_CONVENTION", "series").lower()
    LOG_LEVEL: str = os.getenv("CHERN_FQH_LOG_LEVEL", "WARNING").upper()

    @classmethod
    def validate(cls) -> list[str]:
        """Validate configuration and return list of errors."""
        errors = []

        if cls.MAX_GENERATORS < 2:
            errors.append("CHERN_FQH_MAX_GENERATORS must be at least 2")
        if cls.WORKERS < 1:
            errors.append("CHERN_FQH_WORKERS must be at least 1")
        if cls.PSD_MAX_SIZE < 1:
            errors.append("CHERN_FQH_PSD_MAX_SIZE must be at least 1")
        if cls.CONVENTION not in CONVENTIONS:
            errors.append(f"CHERN_FQH_CONVENTION must be one of {', '.join(CONVENTIONS)}")
        if cls.LOG_LEVEL not in LOG_LEVELS:
            errors.append(f"CHERN_FQH_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")

        return errors


# Create singleton instance
config = Config()
