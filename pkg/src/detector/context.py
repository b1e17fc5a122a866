"""Shared state flowing through the receiver stages."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from src.models.detection import Detection, DetectorConfig, ToaEstimate
from src.models.sample_buffer import SampleBuffer

from .correlation import DynamicChirpCorrelator

MicChoice = Literal["primary", "secondary", "turbo"]


@dataclass
class ReceiverContext:
    """One recording on its way from audio to ToAs."""

    channels: list[SampleBuffer]
    cfg: DetectorConfig
    mic: MicChoice = "primary"
    signal: SampleBuffer | None = None
    correlator: DynamicChirpCorrelator | None = None
    gamma: int | None = None
    gamma_score: float = 0.0
    detections: list[Detection] = field(default_factory=list)
    toas: list[ToaEstimate] = field(default_factory=list)

    @property
    def primary(self) -> SampleBuffer:
        return self.channels[0]

    @property
    def secondary(self) -> SampleBuffer | None:
        return self.channels[1] if len(self.channels) > 1 else None

    @property
    def decoded(self) -> list[Detection]:
        return [d for d in self.detections if d.id is not None]
