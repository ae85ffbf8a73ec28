"""Experiment harness: trial generation, metrics, threshold sweeps, scaling studies and the CLI."""

from .experiment import (
    PUBLISHED_REFERENCE,
    ExperimentConfig,
    ResultTable,
    ScalingResult,
    SweepResult,
    TrialRecord,
    run_experiment,
    scaling_study,
    sweep_threshold,
)

__all__ = [
    "PUBLISHED_REFERENCE",
    "ExperimentConfig",
    "ResultTable",
    "ScalingResult",
    "SweepResult",
    "TrialRecord",
    "run_experiment",
    "scaling_study",
    "sweep_threshold",
]
