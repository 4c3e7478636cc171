"""
Engine Settings
===============
Configuration read from the environment (and a local .env file).

    EQUIBLOW_MAX_STEPS      termination guard for blowup loops (default 50)
    EQUIBLOW_EXPONENT_CAP   largest exponent allowed after substitution (default 2**31)
    EQUIBLOW_ORACLE_BOX     per-variable bound of the brute-force membership box (default 8)
    EQUIBLOW_BATCH_WORKERS  worker threads for `--batch` runs (default 4)
    LOG_LEVEL               root logging level (default INFO)
"""

import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    max_steps: int = Field(default=50, ge=0)
    exponent_cap: int = Field(default=2**31, ge=1)
    oracle_box: int = Field(default=8, ge=1)
    batch_workers: int = Field(default=4, ge=1)
    log_level: str = "INFO"


def _from_env() -> Settings:
    load_dotenv()
    raw = {
        "max_steps": os.getenv("EQUIBLOW_MAX_STEPS"),
        "exponent_cap": os.getenv("EQUIBLOW_EXPONENT_CAP"),
        "oracle_box": os.getenv("EQUIBLOW_ORACLE_BOX"),
        "batch_workers": os.getenv("EQUIBLOW_BATCH_WORKERS"),
        "log_level": os.getenv("LOG_LEVEL"),
    }
    settings = Settings(**{k: v for k, v in raw.items() if v not in (None, "")})
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return _from_env()


def reload_settings() -> Settings:
    """Drop the cached settings and re-read the environment."""
    get_settings.cache_clear()
    return get_settings()
