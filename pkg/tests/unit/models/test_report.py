"""Unit tests for trial records and aggregates."""

import math

import pytest

from src.models.report import (
    AggregateStats,
    ExperimentReport,
    TrialRecord,
    ranked_quantile,
)


def _record(point, trial, error):
    return TrialRecord(
        experiment="demo",
        point=point,
        trial=trial,
        error_m=error,
        detected=error is not None,
    )


class TestRankedQuantile:
    """Nearest-rank quantile with failures ranked last."""

    def test_empty(self):
        assert ranked_quantile([], 0.5) is None

    def test_failures_rank_as_infinite(self):
        assert ranked_quantile([1.0, None, 3.0], 0.5) == 3.0
        assert ranked_quantile([1.0, float("nan"), 3.0], 0.9) == math.inf

    def test_lowest_rank(self):
        assert ranked_quantile([2.0, 1.0], 0.0) == 1.0


class TestAggregateStats:
    """Summary statistics."""

    def test_mixed_values(self):
        agg = AggregateStats.from_values("p", [1.0, 2.0, 3.0, None])
        assert agg.count == 4
        assert agg.median == pytest.approx(2.0)
        assert agg.mean == pytest.approx(2.0)
        assert agg.std == pytest.approx(math.sqrt(2 / 3))
        assert agg.success_rate == pytest.approx(0.75)

    def test_all_failed(self):
        agg = AggregateStats.from_values("p", [None, None])
        assert agg.median is None
        assert agg.success_rate == 0.0

    def test_no_values(self):
        agg = AggregateStats.from_values("p", [])
        assert agg.count == 0
        assert agg.success_rate is None

    def test_explicit_count(self):
        agg = AggregateStats.from_values("p", [0.5], count=4)
        assert agg.success_rate == pytest.approx(0.25)

    def test_rank_failures_majority(self):
        agg = AggregateStats.from_values(
            "p", [0.1, None, None], rank_failures=True
        )
        assert agg.median == math.inf
        assert agg.mean == pytest.approx(0.1)

    def test_rank_failures_all_failed(self):
        agg = AggregateStats.from_values("p", [None], rank_failures=True)
        assert agg.median == math.inf
        assert agg.mean is None


class TestExperimentReport:
    """Record lookups."""

    @pytest.fixture
    def report(self):
        records = [
            _record("d=2", 0, 0.2),
            _record("d=1", 0, 0.1),
            _record("d=2", 1, None),
        ]
        return ExperimentReport(experiment="demo", seed=0, records=records)

    def test_points_keep_first_seen_order(self, report):
        assert report.points() == ["d=2", "d=1"]

    def test_records_for(self, report):
        assert [r.trial for r in report.records_for("d=2")] == [0, 1]

    def test_aggregate_for_missing(self, report):
        assert report.aggregate_for("d=2") is None

    def test_error_aggregates(self, report):
        aggs = report.error_aggregates()
        assert [a.point for a in aggs] == ["d=2", "d=1"]
        assert aggs[0].success_rate == pytest.approx(0.5)

    def test_succeeded(self):
        assert _record("p", 0, 0.3).succeeded
        assert not _record("p", 0, None).succeeded
        assert not _record("p", 0, math.inf).succeeded
