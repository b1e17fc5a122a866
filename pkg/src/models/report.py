from __future__ import annotations

import math
from typing import Any

import numpy as np
from pydantic import Field

from .base import Position, SimBase


def ranked_quantile(values: list[float | None], q: float) -> float | None:
    """
    Nearest-rank quantile with failed entries (None or non-finite) ranked as
    unbounded errors.
    """
    if not values:
        return None
    ranked = sorted(
        v if v is not None and math.isfinite(v) else math.inf for v in values
    )
    index = max(math.ceil(q * len(ranked)) - 1, 0)
    return ranked[index]


class TrialRecord(SimBase):
    """One trial of one experiment point."""

    experiment: str
    point: str = Field(..., description="Label of the swept point, e.g. 'd=5.0'.")
    trial: int = Field(..., ge=0)
    true_position: Position | None = None
    fix_position: Position | None = None
    error_m: float | None = Field(
        default=None, description="Localization or ranging error; None if failed."
    )
    toa_error_s: float | None = None
    bit_errors: int = Field(default=0, ge=0)
    bits: int = Field(default=0, ge=0)
    detected: bool = False
    peak_energy: float | None = None

    @property
    def succeeded(self) -> bool:
        return self.error_m is not None and math.isfinite(self.error_m)


class AggregateStats(SimBase):
    point: str
    count: int
    median: float | None = None
    p90: float | None = None
    mean: float | None = None
    std: float | None = None
    success_rate: float | None = None

    @classmethod
    def from_values(
        cls,
        point: str,
        values: list[float | None],
        count: int | None = None,
        rank_failures: bool = False,
    ) -> AggregateStats:
        """
        Summary statistics over finite values; failed entries lower the
        success rate only.

        With ``rank_failures`` the median and 90th percentile rank failed
        entries as infinite errors, so a point that fails more than half of its
        trials gets an infinite median. Mean and std stay over finite values.
        """
        total = len(values) if count is None else count
        finite = np.asarray(
            [v for v in values if v is not None and math.isfinite(v)],
            dtype=np.float64,
        )
        success_rate = finite.size / total if total else None
        ranked = (
            {
                "median": ranked_quantile(values, 0.5),
                "p90": ranked_quantile(values, 0.9),
            }
            if rank_failures
            else {}
        )
        if finite.size == 0:
            return cls(point=point, count=total, success_rate=success_rate, **ranked)
        return cls(
            point=point,
            count=total,
            median=float(np.median(finite)),
            p90=float(np.percentile(finite, 90)),
            mean=float(np.mean(finite)),
            std=float(np.std(finite)),
            success_rate=success_rate,
        ).model_copy(update=ranked)


class ExperimentReport(SimBase):
    """Per-trial records plus aggregates, reproducible from (config, seed)."""

    experiment: str
    description: str = ""
    seed: int
    config: dict[str, Any] = Field(default_factory=dict)
    records: list[TrialRecord] = Field(default_factory=list)
    aggregates: list[AggregateStats] = Field(default_factory=list)
    series: dict[str, list[float]] = Field(
        default_factory=dict,
        description="Extra plot data, e.g. the sorted errors of a CDF.",
    )

    def points(self) -> list[str]:
        seen: dict[str, None] = {}
        for record in self.records:
            seen.setdefault(record.point, None)
        return list(seen)

    def records_for(self, point: str) -> list[TrialRecord]:
        return [r for r in self.records if r.point == point]

    def aggregate_for(self, point: str) -> AggregateStats | None:
        for agg in self.aggregates:
            if agg.point == point:
                return agg
        return None

    def error_aggregates(self, rank_failures: bool = False) -> list[AggregateStats]:
        """Recompute error aggregates from the records."""
        return [
            AggregateStats.from_values(
                point,
                [r.error_m for r in self.records_for(point)],
                rank_failures=rank_failures,
            )
            for point in self.points()
        ]
