"""Experiment drivers: Levi audits, estimator benchmarks, triangle and delta growth, scaling convergence."""

from experiments.base_experiment import BaseExperiment, load_worm
from experiments.experiment_manager import ExperimentManager

__all__ = ["BaseExperiment", "ExperimentManager", "load_worm"]
