"""
Canned experiments behind ``sweep``.

Each trial synthesizes its own recording from ``(seed, trial)``, so a report
depends only on its parameters and root seed. Trial ``t`` of every sweep
point draws the same random streams, which keeps comparisons between points
paired.
"""

from __future__ import annotations

import math
from typing import Any, ClassVar

import numpy as np

from src.core.common import BaseExperiment, TrialSpec
from src.core.seeding import SeedSplitter
from src.locator.geometry import room_deployment
from src.models.report import AggregateStats, TrialRecord
from src.models.scenario import Scenario

from .trials import (
    base_scenario,
    bit_error_record,
    fix_record,
    random_target_id,
    ranging_record,
    ranging_scenario,
)

DISTANCES_M = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def _by_point(records: list[TrialRecord]) -> dict[str, list[TrialRecord]]:
    points: dict[str, list[TrialRecord]] = {}
    for record in records:
        points.setdefault(record.point, []).append(record)
    return points


class ToaStabilityExperiment(BaseExperiment):
    """Repeated frames from one static target; spread of the measured ToA."""

    name = "toa-stability"
    description = (
        "ToA of a static target against a reference anchor, one frame per "
        "trial; aggregates are signed ToA errors in seconds"
    )
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "snr_db": 20.0,
        "distance": 1.0,
    }

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [(f"d={params['distance']:g}", params["distance"])]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        scenario = ranging_scenario(
            base_scenario(spec.params["scenario"]),
            spec.value,
            snr_db=spec.params["snr_db"],
        )
        return ranging_record(spec, scenario)

    def aggregate(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> list[AggregateStats]:
        return [
            AggregateStats.from_values(point, [r.toa_error_s for r in group])
            for point, group in _by_point(records).items()
        ]


class RangeVsDistanceExperiment(BaseExperiment):
    """Ranging error against target distance for 1- and 3-transducer anchors."""

    name = "range-vs-distance"
    description = (
        "1D ranging error against a reference anchor 0.4 m away, target at "
        "1 to 6 m, single and triple transducer anchors"
    )
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "snr_db": 20.0,
        "distances": DISTANCES_M,
        "transducers": [1, 3],
    }

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [
            (f"n={n},d={d:g}", (int(n), float(d)))
            for n in params["transducers"]
            for d in params["distances"]
        ]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        transducers, distance = spec.value
        scenario = ranging_scenario(
            base_scenario(spec.params["scenario"]),
            distance,
            snr_db=spec.params["snr_db"],
            transducers=transducers,
        )
        return ranging_record(spec, scenario)


class BerVsDistanceExperiment(BaseExperiment):
    """
    Bit error rate of the id field against distance.

    Every trial picks a random target id and decodes it once per round.
    Aggregates are per-trial error rates; the ``ber`` series pools all bits of
    each point.
    """

    name = "ber-vs-distance"
    description = "Id-field bit error rate against target distance"
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "snr_db": 15.0,
        "distances": DISTANCES_M,
        "frames_per_trial": 8,
    }

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [(f"d={d:g}", float(d)) for d in params["distances"]]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        scenario = ranging_scenario(
            base_scenario(spec.params["scenario"]),
            spec.value,
            snr_db=spec.params["snr_db"],
            target_id=random_target_id(spec),
            rounds=int(spec.params["frames_per_trial"]),
        )
        return bit_error_record(spec, scenario)

    def aggregate(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> list[AggregateStats]:
        return [
            AggregateStats.from_values(
                point, [r.bit_errors / r.bits if r.bits else None for r in group]
            )
            for point, group in _by_point(records).items()
        ]

    def series(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> dict[str, list[float]]:
        ber, bits = [], []
        for group in _by_point(records).values():
            total = sum(r.bits for r in group)
            errors = sum(r.bit_errors for r in group)
            bits.append(float(total))
            ber.append(errors / total if total else math.nan)
        return {"ber": ber, "bits": bits}


class Cdf2dExperiment(BaseExperiment):
    """2D fixes at random receiver positions under a ceiling anchor grid."""

    name = "cdf-2d"
    description = (
        "2D localization error at random receiver positions in a 9 m x 3 m "
        "room with 15 ceiling anchors; the 'cdf' series holds sorted errors"
    )
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "snr_db": 10.0,
        "sync_error_std": 100e-6,
        "room": [9.0, 3.0, 3.0],
        "grid": [5, 3],
        "receiver_height": 1.0,
    }

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [("2d", None)]

    def room_scenario(self, params: dict[str, Any]) -> Scenario:
        """
        The base scenario's anchors and cBeacon when it has them, otherwise
        the generated ceiling grid with a wall-mounted cBeacon.
        """
        length, width, height = (float(v) for v in params["room"])
        n_x, n_y = (int(v) for v in params["grid"])
        base = params["scenario"]
        data = base_scenario(base).model_dump() if base is not None else {}
        anchors = data.get("anchors") or [
            a.model_dump() for a in room_deployment(length, width, height, n_x, n_y)
        ]
        receiver = data.get("receiver") or {}
        data.update(
            name=data.get("name") or "room",
            snr_db=params["snr_db"],
            anchors=anchors,
            cbeacon=data.get("cbeacon")
            or {"position": (0.0, width / 2.0, height - 0.5)},
            receiver={
                **receiver,
                "primary": (0.0, 0.0, params["receiver_height"]),
                "secondary": None,
            },
            clock={**data.get("clock", {}), "sync_error_std": params["sync_error_std"]},
            locator={**data.get("locator", {}), "dims": 2, "height": None},
        )
        return Scenario.model_validate(data)

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        room = self.room_scenario(spec.params)
        # Receivers are placed inside the anchor footprint.
        xy = np.array([a.position[:2] for a in room.anchors])
        rng = SeedSplitter(spec.seed).rng(spec.trial, "placement")
        x, y = rng.uniform(xy.min(axis=0), xy.max(axis=0))
        truth = (float(x), float(y), float(spec.params["receiver_height"]))
        scenario = room.model_copy(
            update={"receiver": room.receiver.model_copy(update={"primary": truth})}
        )
        return fix_record(spec, scenario, truth)

    def series(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> dict[str, list[float]]:
        errors = [r.error_m for r in records if r.error_m is not None]
        return {"cdf": sorted(e for e in errors if math.isfinite(e))}


class BandwidthSweepExperiment(BaseExperiment):
    """
    Ranging error against preamble bandwidth.

    Longer preambles cover more of the chirp, so the bandwidth a preamble
    spans is its length times the chirp slope. The guard shrinks to keep every
    frame inside its slot.
    """

    name = "bandwidth-sweep"
    description = (
        "Ranging error at low SNR for 20, 40 and 60 ms preambles; medians rank "
        "missed trials as unbounded errors"
    )
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "snr_db": 0.0,
        "distance": 2.0,
        "preambles_ms": [20.0, 40.0, 60.0],
    }
    rank_failures = True

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        base = base_scenario(params["scenario"])
        cbeacon = base.cbeacon
        slope = cbeacon.bandwidth / cbeacon.period_s if cbeacon else 100_000.0
        return [
            (f"{slope * p / 1e6:g}kHz", float(p)) for p in params["preambles_ms"]
        ]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        base = base_scenario(spec.params["scenario"])
        frame = base.frame
        preamble = spec.value
        guard = max(base.schedule.slot_ms - preamble - frame.id_field_ms, 0.0)
        scenario = ranging_scenario(
            base,
            spec.params["distance"],
            snr_db=spec.params["snr_db"],
            frame={"preamble_ms": preamble, "guard_ms": guard},
        )
        return ranging_record(spec, scenario)


class TurbochargeAbExperiment(BaseExperiment):
    """
    Raw secondary mic against the same channel after dual-mic enhancement,
    with the shadowed primary as a control.

    ``turbo_gain`` holds the peak energy ratio and the median error ratio of
    the enhanced channel over the raw secondary.
    """

    name = "turbocharge-ab"
    description = (
        "Correlation peak energy and ranging error on the raw secondary, the "
        "turbocharged secondary and the shadowed primary"
    )
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "snr_db": -10.0,
        "distance": 2.0,
        "primary_shadow_db": 10.0,
    }
    rank_failures = True

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [(mic, mic) for mic in ("secondary", "turbo", "primary")]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        scenario = ranging_scenario(
            base_scenario(spec.params["scenario"]),
            spec.params["distance"],
            snr_db=spec.params["snr_db"],
            receiver={
                "primary_shadow_db": spec.params["primary_shadow_db"],
                "detection_mic": spec.value,
            },
        )
        return ranging_record(spec, scenario, mic=spec.value, with_peak_energy=True)

    def series(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> dict[str, list[float]]:
        energy: dict[str, float] = {}
        error: dict[str, float] = {}
        for point, group in _by_point(records).items():
            energies = [r.peak_energy for r in group if r.peak_energy is not None]
            energy[point] = float(np.median(energies)) if energies else math.nan
            # Missed trials rank last.
            error[point] = float(
                np.median([math.inf if r.error_m is None else r.error_m for r in group])
            )
        series = {"median_peak_energy": list(energy.values())}
        if "secondary" in energy and "turbo" in energy:
            series["turbo_gain"] = [
                _ratio(energy["turbo"], energy["secondary"]),
                _ratio(error["secondary"], error["turbo"]),
            ]
        return series


def _ratio(numerator: float, denominator: float) -> float:
    if math.isnan(numerator) or math.isnan(denominator):
        return math.nan
    if math.isinf(numerator) and math.isinf(denominator):
        return math.nan
    if denominator == 0:
        return math.inf if numerator > 0 else math.nan
    return numerator / denominator


class NoiseFreeExperiment(BaseExperiment):
    """Ranging floor with no noise and perfect clocks, random target distance."""

    name = "noise-free"
    description = "Synthesis-to-range error floor without noise or clock error"
    defaults: ClassVar[dict[str, Any]] = {
        "scenario": None,
        "min_distance": 1.0,
        "max_distance": 6.0,
    }

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [("floor", None)]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        base = base_scenario(spec.params["scenario"])
        base = base.model_copy(
            update={
                "clock": base.clock.model_copy(
                    update={"sync_error_std": 0.0, "drift_ppm": 0.0}
                )
            }
        )
        rng = SeedSplitter(spec.seed).rng(spec.trial, "placement")
        distance = float(
            rng.uniform(spec.params["min_distance"], spec.params["max_distance"])
        )
        scenario = ranging_scenario(base, distance, snr_db=None)
        return ranging_record(spec, scenario)


BUILTIN_EXPERIMENTS: list[type[BaseExperiment]] = [
    ToaStabilityExperiment,
    RangeVsDistanceExperiment,
    BerVsDistanceExperiment,
    Cdf2dExperiment,
    BandwidthSweepExperiment,
    TurbochargeAbExperiment,
    NoiseFreeExperiment,
]
