"""Experiment orchestration: configs, runners, persistence and the CLI."""
from .config import DEFAULT_THRESHOLDS, EXPERIMENTS, ExperimentConfig, load_thresholds
from .experiments import REGISTRY, Check, Report, run_experiment
from .io import BlockCache, Table, read_csv, write_csv

__all__ = [
    "DEFAULT_THRESHOLDS",
    "EXPERIMENTS",
    "ExperimentConfig",
    "load_thresholds",
    "REGISTRY",
    "Check",
    "Report",
    "run_experiment",
    "BlockCache",
    "Table",
    "read_csv",
    "write_csv",
]
