"""
Scenario to two-channel recording.

The scene holds the cBeacon chirp and one frame per anchor per schedule round;
both microphones hear it through the channel model, ambient white noise is
added at the acoustic stage and the microphone front end downconverts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.channel.propagation import add_white_noise, noise_std_for
from src.channel.scene import AcousticScene, Emission
from src.clocksched.clock import anchor_tx_time
from src.clocksched.schedule import schedule_for
from src.core.seeding import SeedSplitter
from src.micmodel.adc import noise_gain
from src.micmodel.capture import capture
from src.models.base import Position
from src.models.positioning import Schedule
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import Scenario
from src.signals.wav import WavFormat, write_wav
from src.signals.waveforms import gen_chirp, gen_ubeacon_frame

logger = logging.getLogger(__name__)

# Schedule epoch 0 sits this far into the recording, so early clock offsets
# never push a frame before the first sample.
SCHEDULE_START_S = 0.005
# Audio kept after the last slot for late arrivals and the last id field.
CAPTURE_MARGIN_S = 0.1
# Extra chirp rendered before t = 0 so the carrier is present from sample 0.
_CHIRP_LEAD_S = 0.01


@dataclass(frozen=True)
class Transmission:
    anchor_id: int
    round_index: int
    tx_time: float
    # LOS arrival at the primary mic (s)
    arrival: float


@dataclass
class AcousticRender:
    """Pressure at both microphones at the internal rate, before noise."""

    scenario: Scenario
    schedule: Schedule
    primary: SampleBuffer
    secondary: SampleBuffer
    transmissions: list[Transmission]
    range_limited: list[int]
    reference_power: float


@dataclass
class Recording:
    """Two-channel audio at the ADC rate plus the ground truth behind it."""

    scenario: Scenario
    schedule: Schedule
    channels: list[SampleBuffer]
    transmissions: list[Transmission]
    range_limited: list[int]
    noise_std: float

    @property
    def primary(self) -> SampleBuffer:
        return self.channels[0]

    @property
    def secondary(self) -> SampleBuffer:
        return self.channels[1]

    def arrivals(self, anchor_id: int) -> list[float]:
        """LOS arrival times of an anchor's frames at the primary, per round."""
        return [t.arrival for t in self.transmissions if t.anchor_id == anchor_id]

    def true_toa(
        self, anchor_id: int, reference_id: int, round_index: int = 0
    ) -> float:
        """
        Arrival of ``anchor_id`` relative to ``reference_id`` folded into one
        slot and re-centered to (-slot/2, slot/2], as the receiver reports it.
        """
        slot = self.schedule.slot_ms / 1000.0
        arrival = {
            t.anchor_id: t.arrival
            for t in self.transmissions
            if t.round_index == round_index
        }
        toa = (arrival[anchor_id] - arrival[reference_id]) % slot
        return toa - slot if toa >= slot / 2 else toa


def _distance(a: Position, b: Position) -> float:
    return float(np.linalg.norm(np.subtract(a, b)))


def capture_duration(scenario: Scenario, schedule: Schedule) -> float:
    if scenario.duration_s is not None:
        return scenario.duration_s
    return SCHEDULE_START_S + scenario.rounds * schedule.round_s + CAPTURE_MARGIN_S


def reference_power(scene: AcousticScene, scenario: Scenario, gain: float) -> float:
    """
    Power of the strongest downconverted component at the primary mic: the
    cBeacon times the loudest anchor through the quadratic gain.
    """
    arrivals = scene.arrivals(scenario.receiver.primary, gain)
    carriers = [a.amplitude for a in arrivals if a.anchor_id is None]
    beacons = [a.amplitude for a in arrivals if a.anchor_id is not None]
    if not carriers or not beacons:
        return 0.0
    amplitude = scenario.mic.g2 * max(carriers) * max(beacons)
    return 0.5 * amplitude * amplitude


def acoustic_noise_std(scenario: Scenario, power: float) -> float:
    """
    White-noise std at the internal rate that lands ``snr_db`` below ``power``
    once amplified by g1 and band-limited by the anti-alias filter.
    """
    if scenario.snr_db is None or power <= 0:
        return 0.0
    passed = noise_gain(scenario.mic, scenario.internal_rate)
    return noise_std_for(power, scenario.snr_db) / (
        scenario.mic.g1 * math.sqrt(passed)
    )


def render_acoustic(
    scenario: Scenario, splitter: SeedSplitter | None = None, trial: int = 0
) -> AcousticRender:
    splitter = splitter or SeedSplitter(scenario.seed)
    schedule = schedule_for(scenario)
    clock = scenario.clock.model_copy(update={"seed": splitter.seed(trial, "clock")})
    rate = scenario.internal_rate
    c = scenario.speed_of_sound
    duration = capture_duration(scenario, schedule)
    primary_pos = scenario.receiver.primary
    mics = (primary_pos, scenario.receiver.secondary_position)

    scene = AcousticScene(c, scenario.channel)
    if scenario.cbeacon is not None:
        cbeacon = scenario.cbeacon
        echo_delay = max((e.delay_s for e in scenario.channel.echoes), default=0.0)
        lead = (
            max(_distance(cbeacon.position, m) for m in mics) / c
            + echo_delay
            + _CHIRP_LEAD_S
        )
        chirp = gen_chirp(cbeacon.chirp(rate), rate, duration + lead, t0=-lead)
        scene.add(Emission("cbeacon", cbeacon.position, chirp))

    transmissions = []
    for round_index in range(scenario.rounds):
        for anchor in scenario.anchors:
            epoch = schedule.nominal_epoch(anchor.id, round_index)
            tx = SCHEDULE_START_S + anchor_tx_time(anchor.id, epoch, clock)
            frame = gen_ubeacon_frame(
                scenario.frame.frame(anchor.id),
                rate,
                t0=tx,
                amplitude=anchor.tx_amplitude,
            )
            scene.add(
                Emission(f"anchor-{anchor.id}", anchor.position, frame, anchor.id)
            )
            transmissions.append(
                Transmission(
                    anchor.id,
                    round_index,
                    tx,
                    tx + _distance(anchor.position, primary_pos) / c,
                )
            )

    shadow = 10.0 ** (-scenario.receiver.primary_shadow_db / 20.0)
    primary = scene.render(mics[0], rate, duration, gain=shadow)
    secondary = scene.render(mics[1], rate, duration)
    limited = scene.range_limited(primary_pos, schedule.slot_ms / 1000.0)
    logger.info(
        f"Rendered '{scenario.name}': {len(transmissions)} frame(s) over "
        f"{duration:.3f} s at {rate:.0f} Hz"
    )
    return AcousticRender(
        scenario=scenario,
        schedule=schedule,
        primary=primary,
        secondary=secondary,
        transmissions=transmissions,
        range_limited=limited,
        reference_power=reference_power(scene, scenario, shadow),
    )


def synthesize(
    scenario: Scenario,
    splitter: SeedSplitter | None = None,
    trial: int = 0,
    spectrum_path: Path | None = None,
) -> Recording:
    """
    Render, add ambient noise and capture both microphones.

    Noise is white with equal level at both mics; ``snr_db`` is measured
    against the strongest downconverted component at the primary.
    """
    splitter = splitter or SeedSplitter(scenario.seed)
    render = render_acoustic(scenario, splitter, trial)
    std = acoustic_noise_std(scenario, render.reference_power)
    if scenario.snr_db is not None and std == 0.0:
        logger.warning(
            "No downconverted component to reference the noise to; "
            "leaving the recording noise-free"
        )
    noisy = [
        add_white_noise(
            render.primary, std, splitter.sequence(trial, "noise-primary")
        ),
        add_white_noise(
            render.secondary, std, splitter.sequence(trial, "noise-secondary")
        ),
    ]
    channels = [
        capture(noisy[0], scenario.mic, spectrum_path),
        capture(noisy[1], scenario.mic),
    ]
    return Recording(
        scenario=scenario,
        schedule=render.schedule,
        channels=channels,
        transmissions=render.transmissions,
        range_limited=render.range_limited,
        noise_std=std,
    )


def write_recording(
    recording: Recording, path: Path, fmt: WavFormat = "float"
) -> Path:
    """Primary mic on channel 1, secondary on channel 2."""
    return write_wav(path, recording.channels, fmt)
