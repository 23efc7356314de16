"""Configuration, experiments, reports and the command line."""

from .config import ExperimentConfig, SamplingRule
from .experiments import (
    SpecialSectionError,
    degree_growth,
    run_all,
    silverman_limit,
    torsion_growth,
    verify_inequality,
)
from .reports import ExperimentReport, HeightSample, read_report, recompute_headline, write_report

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "HeightSample",
    "SamplingRule",
    "SpecialSectionError",
    "degree_growth",
    "read_report",
    "recompute_headline",
    "run_all",
    "silverman_limit",
    "torsion_growth",
    "verify_inequality",
    "write_report",
]
