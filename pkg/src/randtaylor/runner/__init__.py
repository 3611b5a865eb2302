"""Experiment runner: configs in, CSV tables and a JSON summary out."""

from ..precision import CancellationError, precision_retry
from .cli import main, run
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .report import Report, ReportRow

__all__ = ["CancellationError", "ConfigError", "ExperimentConfig", "Report", "ReportRow", "load_config", "main",
           "parse_config", "precision_retry", "run"]
