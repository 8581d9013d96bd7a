"""Experiment orchestration: configs, estimators, dominance checks, reports."""

from .checks import DominanceReport, RateFit, check_dominance, fit_linear_rate, rate_ratio_curves
from .config import ExperimentConfig, load_config, parse_config
from .experiments import (
    MeanSquareEstimate,
    certified_bound,
    exact_expectation,
    initial_plain_sq,
    initial_weighted_sq,
    monte_carlo,
)

__all__ = [
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "MeanSquareEstimate",
    "monte_carlo",
    "exact_expectation",
    "certified_bound",
    "initial_weighted_sq",
    "initial_plain_sq",
    "DominanceReport",
    "check_dominance",
    "RateFit",
    "fit_linear_rate",
    "rate_ratio_curves",
]
