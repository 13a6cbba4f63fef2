"""Settings and runtime start-up helpers."""

from .settings import AppSettings, get_settings
from .startup import configure_logging, make_rng

__all__ = ["AppSettings", "get_settings", "configure_logging", "make_rng"]
