"""Unit tests for the anchor clock model."""

from __future__ import annotations

import numpy as np
import pytest

from src.clocksched.clock import (
    anchor_tx_time,
    clock_offset,
    drift_rate,
    max_drift_offset,
    sync_residual,
)
from src.core.exceptions import ConfigurationError
from src.models.scenario import ClockModel

C = 344.0


class TestAnchorTxTime:
    def test_perfect_clock(self) -> None:
        clock = ClockModel(sync_error_std=0.0, drift_ppm=0.0)
        for epoch in (0.0, 0.1, 12.3, 100.0):
            assert anchor_tx_time(3, epoch, clock) == epoch

    def test_deterministic_given_seed(self) -> None:
        clock = ClockModel(sync_error_std=1e-4, drift_ppm=20.0, seed=9)
        assert anchor_tx_time(1, 5.0, clock) == anchor_tx_time(1, 5.0, clock)
        other = clock.model_copy(update={"seed": 10})
        assert anchor_tx_time(1, 5.0, clock) != anchor_tx_time(1, 5.0, other)

    def test_sync_error_maps_to_ranging_error(self) -> None:
        clock = ClockModel(sync_error_std=100e-6, seed=1)
        errors = np.array(
            [anchor_tx_time(a, 0.5, clock) - 0.5 for a in range(2000)]
        )
        assert C * errors.std() == pytest.approx(0.0344, rel=0.1)
        assert abs(errors.mean()) < 1e-5

    def test_residual_constant_within_interval(self) -> None:
        clock = ClockModel(sync_error_std=1e-4, sync_interval=32.0, seed=2)
        a = anchor_tx_time(4, 1.0, clock) - 1.0
        b = anchor_tx_time(4, 31.0, clock) - 31.0
        c = anchor_tx_time(4, 33.0, clock) - 33.0
        assert a == pytest.approx(b, abs=1e-15)
        assert a != c

    def test_negative_epoch(self) -> None:
        with pytest.raises(ConfigurationError, match="non-negative"):
            anchor_tx_time(0, -0.1, ClockModel())


class TestDrift:
    def test_drift_accumulates_until_resync(self) -> None:
        clock = ClockModel(sync_error_std=0.0, drift_ppm=20.0, sync_interval=32.0)
        rate = drift_rate(7, clock)
        assert abs(rate) <= 20e-6
        just_before = clock_offset(7, 31.999999, clock)
        assert just_before == pytest.approx(rate * 31.999999)
        assert clock_offset(7, 32.0, clock) == 0.0

    def test_worst_case_bound(self) -> None:
        clock = ClockModel(drift_ppm=20.0, sync_interval=32.0)
        assert max_drift_offset(clock) == pytest.approx(640e-6)
        clock = clock.model_copy(update={"sync_error_std": 0.0})
        offsets = [abs(clock_offset(a, 31.9, clock)) for a in range(200)]
        assert max(offsets) <= 640e-6
        assert max(offsets) > 500e-6

    def test_rates_differ_across_anchors(self) -> None:
        clock = ClockModel(drift_ppm=5.0)
        assert len({drift_rate(a, clock) for a in range(10)}) == 10

    def test_no_drift(self) -> None:
        assert drift_rate(1, ClockModel(drift_ppm=0.0)) == 0.0


class TestSyncResidual:
    def test_independent_across_intervals(self) -> None:
        clock = ClockModel(sync_error_std=1.0, seed=4)
        draws = np.array([sync_residual(2, k, clock) for k in range(3000)])
        lag1 = np.corrcoef(draws[:-1], draws[1:])[0, 1]
        assert abs(lag1) < 0.1

    def test_independent_across_anchors(self) -> None:
        clock = ClockModel(sync_error_std=1.0, seed=4)
        a = np.array([sync_residual(1, k, clock) for k in range(3000)])
        b = np.array([sync_residual(2, k, clock) for k in range(3000)])
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.1

    def test_zero_std(self) -> None:
        assert sync_residual(1, 3, ClockModel(sync_error_std=0.0)) == 0.0
