"""Experiment orchestration: run settings, training sweeps and their aggregation."""

from .config_file import RunSettings, load_settings, read_config_file
from .experiment import (
    AggregateReport,
    ExperimentSpec,
    RunOutcome,
    SetupReport,
    aggregate,
    baseline_frame,
    baseline_returns,
    execute_run,
    run_completed,
    run_directory,
    run_experiment,
    train_run,
)
from .plots import write_plot_scripts

__all__ = [
    "RunSettings",
    "load_settings",
    "read_config_file",
    "ExperimentSpec",
    "AggregateReport",
    "SetupReport",
    "RunOutcome",
    "run_experiment",
    "execute_run",
    "train_run",
    "run_completed",
    "run_directory",
    "aggregate",
    "baseline_frame",
    "baseline_returns",
    "write_plot_scripts",
]
