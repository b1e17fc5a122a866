"""
First-order anchor clock error.

Each sync leaves an anchor with a Gaussian residual offset; between syncs the
offset grows linearly with the anchor's drift rate. Residuals are drawn per
(anchor, sync index) and drift rates per anchor, all from the model seed, so
a transmit time depends only on its inputs.
"""

import logging
import math

import numpy as np

from src.core.exceptions import ConfigurationError
from src.models.scenario import ClockModel

logger = logging.getLogger(__name__)

_DRIFT_STREAM = 0
_SYNC_STREAM = 1


def drift_rate(anchor_id: int, clock: ClockModel) -> float:
    """Fractional frequency error, uniform in +-drift_ppm."""
    if clock.drift_ppm == 0:
        return 0.0
    rng = np.random.default_rng(
        np.random.SeedSequence(clock.seed, spawn_key=(_DRIFT_STREAM, anchor_id))
    )
    return float(rng.uniform(-clock.drift_ppm, clock.drift_ppm)) * 1e-6


def sync_residual(anchor_id: int, sync_index: int, clock: ClockModel) -> float:
    """Offset left by one sync event (s)."""
    if clock.sync_error_std == 0:
        return 0.0
    rng = np.random.default_rng(
        np.random.SeedSequence(
            clock.seed, spawn_key=(_SYNC_STREAM, anchor_id, sync_index)
        )
    )
    return float(rng.normal(0.0, clock.sync_error_std))


def clock_offset(anchor_id: int, t: float, clock: ClockModel) -> float:
    """Lag of an anchor's transmissions behind true time ``t`` (s)."""
    sync_index = math.floor(t / clock.sync_interval)
    since_sync = t - sync_index * clock.sync_interval
    return sync_residual(anchor_id, sync_index, clock) + drift_rate(
        anchor_id, clock
    ) * since_sync


def anchor_tx_time(anchor_id: int, nominal_epoch: float, clock: ClockModel) -> float:
    """True time at which an anchor fires a transmission scheduled at an epoch."""
    if nominal_epoch < 0:
        raise ConfigurationError(
            "Nominal epoch must be non-negative",
            field_name="nominal_epoch",
            expected=">= 0",
            actual=nominal_epoch,
        )
    tx = nominal_epoch + clock_offset(anchor_id, nominal_epoch, clock)
    logger.debug(f"Anchor {anchor_id}: nominal {nominal_epoch:.6f} s -> {tx:.6f} s")
    return tx


def max_drift_offset(clock: ClockModel) -> float:
    """Largest offset drift alone can build up within one sync interval (s)."""
    return clock.drift_ppm * 1e-6 * clock.sync_interval
