"""Process start-up helpers: logging configuration and seeded random streams."""

from __future__ import annotations

import logging

import numpy as np

from .settings import get_settings

__all__ = ["configure_logging", "make_rng", "SAMPLING_STREAM", "MONTECARLO_STREAM", "CHECK_STREAM"]

logger = logging.getLogger(__name__)

# Spawn keys of the per-component streams derived from a run seed.
SAMPLING_STREAM = 0
MONTECARLO_STREAM = 1
CHECK_STREAM = 2

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Apply the configured log level to the root logger."""

    settings = get_settings()
    resolved = (level or settings.log_level).upper()
    logging.basicConfig(level=resolved, format=_LOG_FORMAT, force=True)
    logger.debug("Logging configured at %s", resolved)


def make_rng(seed: int, component: int = SAMPLING_STREAM) -> np.random.Generator:
    """Return the counter-based random stream of one run component.

    Every component of a run draws from its own Philox stream, keyed by the
    run seed and the component's spawn key, so adding draws to one component
    never shifts another.
    """

    sequence = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(component,))
    return np.random.Generator(np.random.Philox(sequence))
