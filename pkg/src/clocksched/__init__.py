from .clock import (
    anchor_tx_time,
    clock_offset,
    drift_rate,
    max_drift_offset,
    sync_residual,
)
from .energy import EnergyEstimate, EnergyProfile, estimate_energy
from .schedule import build_schedule, schedule_for

__all__ = [
    "EnergyEstimate",
    "EnergyProfile",
    "anchor_tx_time",
    "build_schedule",
    "clock_offset",
    "drift_rate",
    "estimate_energy",
    "max_drift_offset",
    "schedule_for",
    "sync_residual",
]
