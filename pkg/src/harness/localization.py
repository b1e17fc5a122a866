"""Audio to position fix, and the CSV tables describing the result."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.core.tables import write_table
from src.detector.context import MicChoice, ReceiverContext
from src.detector.receiver import BeaconReceiver
from src.detector.slope import identify_cbeacon
from src.locator.trilateration import Trilaterator
from src.models.base import Position
from src.models.detection import Detection, DetectorConfig, ToaEstimate
from src.models.positioning import PositionFix, PseudoRangeSet
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import Scenario

logger = logging.getLogger(__name__)


@dataclass
class LocateResult:
    """Everything the receiver and the locator produced for one recording."""

    cfg: DetectorConfig | None = None
    detections: list[Detection] = field(default_factory=list)
    toas: list[ToaEstimate] = field(default_factory=list)
    pseudo_ranges: PseudoRangeSet | None = None
    fix: PositionFix | None = None
    gamma: int | None = None
    room: str | None = None

    @property
    def fixes(self) -> list[PositionFix]:
        return [self.fix] if self.fix is not None else []


def initial_guess(
    prs: PseudoRangeSet, scenario: Scenario
) -> Position | None:
    """
    Anchor centroid at the expected receiver height. Ceiling-mounted anchors
    are coplanar, so their own centroid is a singular starting point in 3D.
    """
    if len(prs) == 0:
        return None
    x, y, _ = np.mean(prs.anchors, axis=0)
    return (float(x), float(y), scenario.locator_height())


def solve_fix(
    toas: Sequence[ToaEstimate],
    anchors: Mapping[int, Position],
    scenario: Scenario,
    cfg: DetectorConfig,
) -> tuple[PseudoRangeSet, PositionFix | None]:
    """
    Pair ToAs with surveyed anchors and trilaterate.

    No ToAs at all gives no fix; too few raise InsufficientAnchorsError.
    """
    unknown = sorted({t.anchor_id for t in toas} - set(anchors))
    if unknown:
        logger.warning(f"Ignoring decoded id(s) {unknown} missing from the anchor map")
    prs = PseudoRangeSet.from_toas(
        toas, anchors, scenario.speed_of_sound, slot_s=cfg.slot_ms / 1000.0
    )
    if len(prs) == 0:
        logger.warning("No anchor could be paired with a ToA; no fix")
        return prs, None
    solver = Trilaterator(scenario.locator, height=scenario.locator_height())
    return prs, solver.solve(prs, initial_guess(prs, scenario))


def locate_channels(
    channels: list[SampleBuffer],
    scenario: Scenario,
    anchors: Mapping[int, Position] | None = None,
    mic: MicChoice | None = None,
) -> LocateResult:
    """
    Run the receiver and the locator on audio.

    Raises:
        CBeaconAbsentError: If no chirp carrier is in the audio
        InsufficientDataError: If the audio is too short to search
        LocalizationError: If the decoded anchors cannot give a fix
    """
    cfg = DetectorConfig.from_scenario(scenario)
    receiver = BeaconReceiver(cfg, mic or scenario.receiver.detection_mic)
    context: ReceiverContext = receiver.process(channels)
    positions = scenario.anchor_map() if anchors is None else dict(anchors)
    prs, fix = solve_fix(context.toas, positions, scenario, cfg)
    return LocateResult(
        cfg=cfg,
        detections=context.detections,
        toas=context.toas,
        pseudo_ranges=prs,
        fix=fix,
        gamma=context.gamma,
        room=scenario.name,
    )


def select_room(
    channels: list[SampleBuffer],
    scenarios: Sequence[Scenario],
    mic: MicChoice | None = None,
) -> int:
    """
    Index of the scenario whose cBeacon sweep slope matches the recording.

    Each room runs its own chirp slope; a single scenario needs no search.

    Raises:
        CBeaconAbsentError: If no candidate chirp is in the audio
    """
    if not scenarios:
        raise ValueError("At least one scenario is needed to locate")
    if len(scenarios) == 1:
        return 0
    choice = mic or scenarios[0].receiver.detection_mic
    audio = channels[1] if choice != "primary" and len(channels) > 1 else channels[0]
    configs = [DetectorConfig.from_scenario(s) for s in scenarios]
    index, _, score = identify_cbeacon(audio, configs)
    logger.info(f"Recording matches room '{scenarios[index].name}' (score {score:.1f})")
    return index


def locate_rooms(
    channels: list[SampleBuffer],
    scenarios: Sequence[Scenario],
    anchors: Mapping[int, Position] | None = None,
    mic: MicChoice | None = None,
) -> LocateResult:
    """:func:`locate_channels` with the room picked by :func:`select_room`."""
    index = select_room(channels, scenarios, mic)
    return locate_channels(channels, scenarios[index], anchors, mic)


def detection_rows(result: LocateResult) -> list[dict[str, object]]:
    """One row per preamble; ``t_i`` is set on the detection that gave a ToA."""
    toa_by_start = {t.b_start: t.toa_s for t in result.toas}
    return [
        {
            "id": d.id,
            "b_start": d.b_start,
            "t_i": toa_by_start.get(d.b_start),
            "peak_score": d.peak_score,
            "parity_ok": d.parity_ok,
            "gamma": d.gamma,
            "tau": d.tau,
        }
        for d in result.detections
    ]


def fix_rows(fixes: Sequence[PositionFix]) -> list[dict[str, object]]:
    return [
        {
            "x": f.position[0],
            "y": f.position[1],
            "z": f.position[2],
            "beta": f.clock_term,
            "residual_rms": f.residual_rms,
            "converged": f.converged,
            "iterations": f.iterations,
        }
        for f in fixes
    ]


def write_detections(path: Path, result: LocateResult) -> Path:
    return write_table(path, "detections", detection_rows(result))


def write_fixes(path: Path, fixes: Sequence[PositionFix]) -> Path:
    return write_table(path, "fixes", fix_rows(fixes))
