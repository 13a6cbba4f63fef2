"""Exception hierarchy shared by every adasample module."""

from __future__ import annotations

__all__ = [
    "AdaSampleError",
    "DatasetError",
    "LibsvmParseError",
    "ModelError",
    "SamplingError",
    "DegenerateGradientError",
    "StepSizeError",
    "ConfigError",
    "FeatureWidthError",
]


class AdaSampleError(Exception):
    """Base class for errors raised by the library."""


class DatasetError(AdaSampleError, ValueError):
    """Invalid dataset input or construction parameters."""


class LibsvmParseError(DatasetError):
    """Malformed LIBSVM text, reported with the offending line."""

    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ModelError(AdaSampleError, ValueError):
    """Invalid arguments to a model oracle (empty subset, shape mismatch)."""


class SamplingError(AdaSampleError, ValueError):
    """Invalid batch-controller state or test inputs."""


class DegenerateGradientError(SamplingError):
    """A gradient norm vanished, the run has converged or degenerated."""


class StepSizeError(AdaSampleError, ValueError):
    """Non-finite or out-of-domain step-size inputs."""


class ConfigError(AdaSampleError, ValueError):
    """Experiment configuration that cannot be run."""


class FeatureWidthError(DatasetError, ConfigError):
    """A requested feature count below the largest feature index present."""
