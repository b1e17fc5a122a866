"""Acoustic scene: every emission in a room as heard at one microphone."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from src.models.base import Position
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import ChannelConfig

from .propagation import align_to, mix, path_gain, propagate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Emission:
    """A transmitted buffer at a fixed position; no ``anchor_id`` for the cBeacon."""

    label: str
    position: Position
    buffer: SampleBuffer
    anchor_id: int | None = None


@dataclass(frozen=True)
class Arrival:
    label: str
    anchor_id: int | None
    distance: float
    delay_s: float
    amplitude: float


@dataclass
class AcousticScene:
    c: float
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    emissions: list[Emission] = field(default_factory=list)

    def add(self, emission: Emission) -> AcousticScene:
        self.emissions.append(emission)
        return self

    def arrivals(self, mic: Position, gain: float = 1.0) -> list[Arrival]:
        """Line-of-sight arrival of each emission: distance, delay, peak amplitude."""
        result = []
        for emission in self.emissions:
            distance = float(np.linalg.norm(np.subtract(mic, emission.position)))
            peak = float(np.max(np.abs(emission.buffer.samples), initial=0.0))
            amplitude = (
                gain * peak * path_gain(distance, self.channel.absorption_db_per_m)
            )
            result.append(
                Arrival(
                    emission.label,
                    emission.anchor_id,
                    distance,
                    distance / self.c,
                    amplitude,
                )
            )
        return result

    def range_limited(self, mic: Position, slot_s: float) -> list[int]:
        """Anchors whose propagation delay reaches a full slot."""
        limit = self.c * slot_s
        flagged = sorted(
            {
                a.anchor_id
                for a in self.arrivals(mic)
                if a.anchor_id is not None and a.distance >= limit
            }
        )
        for anchor_id in flagged:
            logger.warning(
                f"Anchor {anchor_id} is beyond the one-slot range of {limit:.1f} m; "
                "its ToA will wrap"
            )
        return flagged

    def render(
        self, mic: Position, rate: float, duration: float, gain: float = 1.0
    ) -> SampleBuffer:
        """Superposition at ``mic`` over [0, duration) on the absolute grid."""
        n = int(round(duration * rate))
        paths = [
            propagate(
                e.buffer,
                e.position,
                mic,
                self.c,
                self.channel.echoes,
                self.channel.absorption_db_per_m,
            )
            for e in self.emissions
            if len(e.buffer)
        ]
        if not paths:
            return SampleBuffer.zeros(n, rate)
        heard = align_to(mix(paths), 0.0, n)
        if gain != 1.0:
            heard = heard.scaled(gain)
        logger.debug(f"Rendered {len(paths)} emission(s) at {mic}: {n} samples")
        return heard
