"""
Single-trial building blocks shared by the experiments.

Ranging trials use a fixed line-of-sight geometry: the receiver at
``RECEIVER_POSITION``, a reference anchor ``REFERENCE_DISTANCE_M`` away and the
target anchor along +x. The reference transmits in slot 0 and the target in
slot 1, so each preamble is paired with its anchor by where it lands in the
schedule and ranging never depends on id decoding.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.core.common import TrialSpec
from src.core.exceptions import (
    CBeaconAbsentError,
    InsufficientDataError,
    LocalizationError,
)
from src.core.seeding import SeedSplitter
from src.detector.context import MicChoice, ReceiverContext
from src.detector.decoding import decode_bits
from src.detector.receiver import BeaconReceiver
from src.locator.trilateration import estimate_range
from src.models.base import Position
from src.models.detection import Detection, DetectorConfig
from src.models.report import TrialRecord
from src.models.scenario import ReceiverConfig, Scenario
from src.models.signal_params import FIELD_BITS, MAX_BEACON_ID, id_to_bits

from .localization import locate_channels
from .synthesis import Recording, synthesize

logger = logging.getLogger(__name__)

RECEIVER_POSITION: Position = (0.0, 0.0, 1.0)
CBEACON_POSITION: Position = (0.0, 0.5, 1.5)
REFERENCE_DISTANCE_M = 0.4
REFERENCE_ID = 1
TARGET_ID = 2

# Receiver failures that make a trial count as missed rather than abort the run.
TRIAL_FAILURES = (CBeaconAbsentError, InsufficientDataError)


def base_scenario(value: Scenario | dict[str, Any] | None) -> Scenario:
    """The scenario experiments derive from; defaults everywhere when None."""
    if value is None:
        return Scenario(
            name="ranging",
            receiver=ReceiverConfig(primary=RECEIVER_POSITION),
        )
    if isinstance(value, Scenario):
        return value
    return Scenario.model_validate(value)


def _distance(a: Position, b: Position) -> float:
    return float(np.linalg.norm(np.subtract(a, b)))


def target_position(distance: float) -> Position:
    x, y, z = RECEIVER_POSITION
    return (x + distance, y, z)


def reference_position() -> Position:
    x, y, z = RECEIVER_POSITION
    return (x, y - REFERENCE_DISTANCE_M, z)


def ranging_scenario(
    base: Scenario,
    distance: float,
    *,
    snr_db: float | None,
    transducers: int = 1,
    target_id: int = TARGET_ID,
    rounds: int = 1,
    frame: dict[str, Any] | None = None,
    receiver: dict[str, Any] | None = None,
) -> Scenario:
    """
    ``base`` with the ranging geometry swapped in.

    Chirp, frame, microphone, channel and clock settings come from ``base``;
    the receiver, cBeacon position, anchors and schedule are replaced.
    """
    if target_id == REFERENCE_ID:
        raise ValueError(f"Target id must differ from the reference id {REFERENCE_ID}")
    data = base.model_dump()
    data.update(
        snr_db=snr_db,
        rounds=rounds,
        duration_s=None,
        cbeacon={**(data["cbeacon"] or {}), "position": CBEACON_POSITION},
        receiver={
            **data["receiver"],
            "primary": RECEIVER_POSITION,
            "secondary": None,
            **(receiver or {}),
        },
        frame={**data["frame"], **(frame or {})},
        schedule={**data["schedule"], "groups": []},
        anchors=[
            {"id": REFERENCE_ID, "position": reference_position()},
            {
                "id": target_id,
                "position": target_position(distance),
                "transducers": transducers,
            },
        ],
    )
    return Scenario.model_validate(data)


def mic_position(scenario: Scenario, mic: MicChoice) -> Position:
    if mic == "primary":
        return scenario.receiver.primary
    return scenario.receiver.secondary_position


def match_slot(
    detections: Sequence[Detection], expected: float, slot_samples: int
) -> Detection | None:
    """Strongest preamble within a quarter slot of the expected start index."""
    window = slot_samples / 4.0
    near = [d for d in detections if abs(d.b_start - expected) <= window]
    return max(near, key=lambda d: d.peak_score, default=None)


def slot_toa(target: Detection, reference: Detection, cfg: DetectorConfig) -> float:
    """Target ToA relative to the reference, folded into (-slot/2, slot/2]."""
    slot = cfg.slot_samples
    offset = (target.b_start - reference.b_start) % slot
    if offset >= slot / 2:
        offset -= slot
    return offset / cfg.adc_rate


def peak_energy(
    context: ReceiverContext, expected: float, slot_samples: int
) -> float | None:
    """
    Squared peak-to-floor ratio of the preamble correlation near the expected
    start, whether or not it cleared the detection threshold.
    """
    if context.correlator is None or context.gamma is None:
        return None
    mag = context.correlator.preamble_correlation(context.gamma)
    window = slot_samples // 4
    lo = max(int(round(expected)) - window, 0)
    hi = min(int(round(expected)) + window + 1, mag.size)
    if hi <= lo:
        return None
    floor = context.correlator.noise_floor(context.gamma)
    if floor <= 0:
        return None
    return float((mag[lo:hi].max() / floor) ** 2)


@dataclass
class RangingOutcome:
    recording: Recording
    context: ReceiverContext | None
    reference: Detection | None = None
    target: Detection | None = None


def receive(
    scenario: Scenario, spec: TrialSpec, mic: MicChoice, decode: bool = False
) -> tuple[Recording, ReceiverContext | None]:
    """Synthesize one trial and run the receiver; a receiver failure gives None."""
    recording = synthesize(scenario, SeedSplitter(spec.seed), spec.trial)
    cfg = DetectorConfig.from_scenario(scenario)
    try:
        context = BeaconReceiver(cfg, mic, decode=decode).process(recording.channels)
    except TRIAL_FAILURES as e:
        logger.debug(f"{spec.experiment} {spec.point} trial {spec.trial}: {e}")
        return recording, None
    return recording, context


def run_ranging(
    scenario: Scenario, spec: TrialSpec, mic: MicChoice = "primary"
) -> RangingOutcome:
    recording, context = receive(scenario, spec, mic)
    outcome = RangingOutcome(recording, context)
    if context is None:
        return outcome
    slot = context.cfg.slot_samples
    rate = context.cfg.adc_rate
    outcome.reference = match_slot(
        context.detections, recording.arrivals(REFERENCE_ID)[0] * rate, slot
    )
    target_id = next(a.id for a in scenario.anchors if a.id != REFERENCE_ID)
    outcome.target = match_slot(
        context.detections, recording.arrivals(target_id)[0] * rate, slot
    )
    return outcome


def ranging_record(
    spec: TrialSpec,
    scenario: Scenario,
    mic: MicChoice = "primary",
    with_peak_energy: bool = False,
) -> TrialRecord:
    """
    Range the target against the reference anchor.

    ``error_m`` is the absolute ranging error at the detecting mic and
    ``toa_error_s`` the signed ToA error; both stay None when either preamble
    was missed.
    """
    outcome = run_ranging(scenario, spec, mic)
    at = mic_position(scenario, mic)
    reference, target = scenario.anchors[0], scenario.anchors[1]
    d_ref = _distance(reference.position, at)
    d_true = _distance(target.position, at)
    c = scenario.speed_of_sound
    record: dict[str, Any] = {
        "experiment": spec.experiment,
        "point": spec.point,
        "trial": spec.trial,
        "true_position": target.position,
    }
    context = outcome.context
    if with_peak_energy and context is not None:
        expected = outcome.recording.arrivals(target.id)[0] * context.cfg.adc_rate
        record["peak_energy"] = peak_energy(
            context, expected, context.cfg.slot_samples
        )
    if context is None or outcome.reference is None or outcome.target is None:
        return TrialRecord(**record)
    toa = slot_toa(outcome.target, outcome.reference, context.cfg)
    estimate = estimate_range(toa, c, d_ref)
    return TrialRecord(
        **record,
        error_m=abs(estimate - d_true),
        toa_error_s=toa - (d_true - d_ref) / c,
        detected=True,
    )


def random_target_id(spec: TrialSpec) -> int:
    """A uniformly drawn id other than the reference's, from the 'ids' stream."""
    rng = SeedSplitter(spec.seed).rng(spec.trial, "ids")
    candidate = int(rng.integers(0, MAX_BEACON_ID))
    return candidate + 1 if candidate >= REFERENCE_ID else candidate


def bit_error_record(spec: TrialSpec, scenario: Scenario) -> TrialRecord:
    """
    Decode the target's id field once per round and count bit errors.

    A round whose preamble is missed or cut off contributes no bits.
    """
    recording, context = receive(scenario, spec, "primary")
    target = scenario.anchors[1]
    record = TrialRecord(
        experiment=spec.experiment,
        point=spec.point,
        trial=spec.trial,
        true_position=target.position,
    )
    if context is None or context.correlator is None:
        return record
    sent = id_to_bits(target.id)
    errors = bits = 0
    for arrival in recording.arrivals(target.id):
        det = match_slot(
            context.detections,
            arrival * context.cfg.adc_rate,
            context.cfg.slot_samples,
        )
        if det is None:
            continue
        try:
            received = decode_bits(context.correlator, det)
        except InsufficientDataError:
            continue
        errors += sum(a != b for a, b in zip(sent, received, strict=True))
        bits += FIELD_BITS
    return record.model_copy(
        update={
            "bit_errors": errors,
            "bits": bits,
            "detected": bits > 0,
        }
    )


def fix_record(spec: TrialSpec, scenario: Scenario, truth: Position) -> TrialRecord:
    """Full receiver and locator on one recording; errors are over the solved axes."""
    recording = synthesize(scenario, SeedSplitter(spec.seed), spec.trial)
    record = TrialRecord(
        experiment=spec.experiment,
        point=spec.point,
        trial=spec.trial,
        true_position=truth,
    )
    try:
        result = locate_channels(recording.channels, scenario)
    except (*TRIAL_FAILURES, LocalizationError) as e:
        logger.debug(f"{spec.experiment} trial {spec.trial}: {e}")
        return record
    if result.fix is None:
        return record
    return record.model_copy(
        update={
            "fix_position": result.fix.position,
            "error_m": result.fix.error_to(truth),
            "detected": True,
        }
    )
