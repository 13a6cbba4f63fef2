"""Harness services behind the command-line interface."""

from .bounds_service import BoundsReport, bounds_report
from .check_service import CheckReport, CheckService, corrupted_grad
from .compare_service import CompareService, VariantSpec, parse_variant_token
from .experiment_service import ExperimentService, TrainResult, run_header, summarize
from .markov_service import MarkovReport, montecarlo_markov_suite, sin_squared, synthetic_population

__all__ = [
    "BoundsReport",
    "bounds_report",
    "CheckReport",
    "CheckService",
    "corrupted_grad",
    "CompareService",
    "VariantSpec",
    "parse_variant_token",
    "ExperimentService",
    "TrainResult",
    "run_header",
    "summarize",
    "MarkovReport",
    "montecarlo_markov_suite",
    "sin_squared",
    "synthetic_population",
]
