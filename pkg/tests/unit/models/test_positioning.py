"""Unit tests for pseudo-range sets, fixes and schedules."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.exceptions import ConfigurationError
from src.models.detection import ToaEstimate
from src.models.positioning import PositionFix, PseudoRangeSet, Schedule


def _toa(anchor_id, toa_s):
    return ToaEstimate(anchor_id=anchor_id, toa_s=toa_s, b_start=0.0, peak_score=20.0)


class TestPseudoRangeSet:
    """Construction checks and derived ranges."""

    def test_default_ids(self):
        prs = PseudoRangeSet(np.zeros((2, 3)), np.array([0.0, 0.001]), 340.0)
        assert prs.ids == (0, 1)
        assert len(prs) == 2
        assert prs.pseudo_ranges == pytest.approx([0.0, 0.34])

    def test_clock_offset_subtracted(self):
        prs = PseudoRangeSet(np.zeros((1, 3)), np.array([0.002]), 340.0, t_s=0.001)
        assert prs.pseudo_ranges == pytest.approx([0.34])

    def test_count_mismatch(self):
        with pytest.raises(ConfigurationError, match="exactly one ToA"):
            PseudoRangeSet(np.zeros((2, 3)), np.array([0.0]), 340.0)

    def test_non_positive_speed(self):
        with pytest.raises(ConfigurationError, match="Speed of sound"):
            PseudoRangeSet(np.zeros((1, 3)), np.array([0.0]), 0.0)

    def test_non_finite(self):
        with pytest.raises(ConfigurationError, match="finite"):
            PseudoRangeSet(np.zeros((1, 3)), np.array([np.nan]), 340.0)

    def test_ids_mismatch(self):
        with pytest.raises(ConfigurationError, match="ids"):
            PseudoRangeSet(np.zeros((2, 3)), np.zeros(2), 340.0, ids=(1,))

    def test_subset(self):
        prs = PseudoRangeSet(np.eye(3), np.array([0.1, 0.2, 0.3]), 340.0, ids=(4, 5, 6))
        kept = prs.subset([True, False, True])
        assert kept.ids == (4, 6)
        assert kept.toas == pytest.approx([0.1, 0.3])

    def test_from_toas_wraps_and_skips(self):
        anchors = {3: (1.0, 0.0, 2.0), 7: (0.0, 1.0, 2.0)}
        prs = PseudoRangeSet.from_toas(
            [_toa(3, 0.004), _toa(7, 0.095), _toa(99, 0.01)],
            anchors,
            340.0,
            slot_s=0.1,
        )
        assert prs.ids == (3, 7)
        assert prs.toas == pytest.approx([0.004, -0.005])
        assert prs.anchors[1] == pytest.approx([0.0, 1.0, 2.0])

    def test_from_toas_empty(self):
        prs = PseudoRangeSet.from_toas([], {}, 340.0)
        assert len(prs) == 0
        assert prs.anchors.shape == (0, 3)


class TestPositionFix:
    """Fix validation and error metric."""

    def test_error_over_solved_dims(self):
        fix = PositionFix(
            position=(3.0, 4.0, 9.0),
            clock_term=0.0,
            residual_rms=0.01,
            iterations=4,
            converged=True,
            dims=2,
        )
        assert fix.error_to((0.0, 0.0, 0.0)) == pytest.approx(5.0)

    def test_converged_needs_finite_residual(self):
        with pytest.raises(ValidationError, match="finite residual"):
            PositionFix(
                position=(0, 0, 0),
                clock_term=0.0,
                residual_rms=float("inf"),
                iterations=1,
                converged=True,
            )


class TestSchedule:
    """Slot timing."""

    def test_epochs(self):
        schedule = Schedule(slot_ms=100.0, slots={3: 0, 7: 2}, n_slots=3)
        assert schedule.round_s == pytest.approx(0.3)
        assert schedule.nominal_epoch(3) == pytest.approx(0.0)
        assert schedule.nominal_epoch(7, 1) == pytest.approx(0.5)
