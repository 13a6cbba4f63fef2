from __future__ import annotations

from functools import lru_cache

from pydantic import ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings


class AppSettings(BaseSettings):
    """Runtime configuration loaded from environment variables or .env."""

    model_config = ConfigDict(env_file=".env", env_file_encoding="utf-8", populate_by_name=True)
    app_name: str = "adasample"
    log_level: str = Field(default="INFO", alias="ADASAMPLE_LOG_LEVEL")
    output_dir: str = Field(default=".", alias="ADASAMPLE_OUTPUT_DIR")
    eval_every: int = Field(default=10, alias="ADASAMPLE_EVAL_EVERY", ge=0)
    check_tolerance: float = Field(default=1e-5, alias="ADASAMPLE_CHECK_TOLERANCE", gt=0)
    check_states: int = Field(default=20, alias="ADASAMPLE_CHECK_STATES", ge=1)
    workers: int = Field(default=1, alias="ADASAMPLE_WORKERS", ge=1)
    float_digits: int = Field(default=17, alias="ADASAMPLE_FLOAT_DIGITS", ge=1, le=17)

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper_log_level(cls, value: str) -> str:
        return str(value).strip().upper()


@lru_cache(maxsize=1)
def get_settings() -> AppSettings:
    """Return a cached settings instance for process-wide use."""

    return AppSettings()
