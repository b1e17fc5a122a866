"""Common base classes and utilities for core functionality."""

from .base_experiment import BaseExperiment, TrialSpec, run_trials
from .base_parser import BaseConfigParser

__all__ = ["BaseConfigParser", "BaseExperiment", "TrialSpec", "run_trials"]
