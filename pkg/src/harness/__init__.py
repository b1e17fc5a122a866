"""Scenario synthesis, localization runs and experiment reports."""

from .config import load_anchor_map, load_experiment_config, load_scenario
from .localization import LocateResult, locate_channels
from .report import write_report
from .synthesis import Recording, synthesize

__all__ = [
    "LocateResult",
    "Recording",
    "load_anchor_map",
    "load_experiment_config",
    "load_scenario",
    "locate_channels",
    "synthesize",
    "write_report",
]
