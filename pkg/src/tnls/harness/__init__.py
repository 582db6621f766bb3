"""Experiment orchestration: config parsing, runners, reports, CLI."""

from .config import ConfigError, ExperimentConfig
from .experiments import (
    run_conservation,
    run_euclidean_comparison,
    run_extinction,
    run_hflf,
    run_orthogonality,
    run_strichartz,
    run_trilinear,
)
from .reports import ExperimentReport

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "run_conservation",
    "run_euclidean_comparison",
    "run_extinction",
    "run_hflf",
    "run_orthogonality",
    "run_strichartz",
    "run_trilinear",
]
