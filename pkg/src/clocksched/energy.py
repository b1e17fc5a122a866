"""
Analytic duty-cycle energy of one anchor.

An anchor spends energy on periodic clock syncs, on its beacon frames and on
idling in between. The per-event constants are user inputs; the calculator
only does the bookkeeping, which is enough to compare sync intervals and
schedules against each other.
"""

import logging
import math

from pydantic import Field

from src.models.base import SimBase
from src.models.positioning import Schedule
from src.models.scenario import ClockModel

logger = logging.getLogger(__name__)

_EPS = 1e-9


class EnergyProfile(SimBase):
    sync_energy_j: float = Field(
        default=0.5, ge=0, description="Energy of one clock sync (J)."
    )
    beacon_energy_j: float = Field(
        default=0.0005, ge=0, description="Energy of one beacon frame (J)."
    )
    idle_power_w: float = Field(default=0.01, ge=0, description="Idle power (W).")


class EnergyEstimate(SimBase):
    duration_s: float
    syncs: int
    beacons: int
    sync_j: float
    beacon_j: float
    idle_j: float

    @property
    def total_j(self) -> float:
        return self.sync_j + self.beacon_j + self.idle_j

    @property
    def average_power_w(self) -> float:
        return self.total_j / self.duration_s if self.duration_s > 0 else 0.0

    @property
    def sync_share(self) -> float:
        """Fraction of the total spent on syncs."""
        return self.sync_j / self.total_j if self.total_j > 0 else 0.0


def estimate_energy(
    profile: EnergyProfile,
    schedule: Schedule,
    clock: ClockModel,
    duration_s: float,
) -> EnergyEstimate:
    """Energy of one anchor that beacons once per round and syncs on schedule."""
    if duration_s < 0:
        raise ValueError(f"duration_s must be non-negative, got {duration_s}")
    syncs = math.ceil(duration_s / clock.sync_interval - _EPS)
    beacons = 0
    if schedule.n_slots:
        beacons = math.floor(duration_s / schedule.round_s + _EPS)
    estimate = EnergyEstimate(
        duration_s=duration_s,
        syncs=syncs,
        beacons=beacons,
        sync_j=syncs * profile.sync_energy_j,
        beacon_j=beacons * profile.beacon_energy_j,
        idle_j=duration_s * profile.idle_power_w,
    )
    logger.debug(
        f"{duration_s:.0f} s: {syncs} sync(s), {beacons} beacon(s), "
        f"{estimate.total_j:.3f} J"
    )
    return estimate
