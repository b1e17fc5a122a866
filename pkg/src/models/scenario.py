from __future__ import annotations

from typing import Any, Literal

import numpy as np
from pydantic import Field, model_validator

from .base import Position, SimBase
from .signal_params import MAX_BEACON_ID, ChirpParams, FrameTiming

DEFAULT_SPEED_OF_SOUND = 344.38
DEFAULT_INTERNAL_RATE = 441_000.0
DEFAULT_MIC_SEPARATION = 0.10


class MicNonlinearity(SimBase):
    """
    Microphone front end: polynomial amplifier, anti-alias FIR and ADC.

    The FIR keeps ``lpf_taps`` taps and places its Kaiser transition so that
    ``lpf_attenuation_db`` is reached at ``lpf_stopband``; the half-amplitude
    point never exceeds ``lpf_cutoff``.
    """

    g1: float = Field(default=1.0, gt=0, description="Linear gain G1.")
    g2: float = Field(default=0.05, ge=0, description="Quadratic gain G2.")
    g3: float = Field(default=0.0, description="Cubic gain G3.")
    lpf_cutoff: float = Field(default=22_000.0, gt=0, description="LPF cutoff (Hz).")
    lpf_stopband: float = Field(
        default=25_000.0, gt=0, description="Frequency where the stopband starts."
    )
    lpf_attenuation_db: float = Field(
        default=65.0, gt=0, description="Design attenuation at the stopband edge."
    )
    lpf_taps: int = Field(default=255, ge=3, description="FIR length (odd).")
    adc_rate: float = Field(default=44_100.0, gt=0, description="ADC rate (Hz).")
    quantize_16bit: bool = Field(
        default=False, description="Round the ADC output to 16-bit PCM steps."
    )

    @model_validator(mode="after")
    def _check_filter(self) -> MicNonlinearity:
        if self.lpf_cutoff > self.adc_rate / 2:
            raise ValueError(
                f"lpf_cutoff {self.lpf_cutoff} exceeds ADC Nyquist {self.adc_rate / 2}"
            )
        if self.lpf_stopband <= self.lpf_cutoff:
            raise ValueError("lpf_stopband must lie above lpf_cutoff")
        if self.lpf_taps % 2 == 0:
            raise ValueError("lpf_taps must be odd for a symmetric linear-phase FIR")
        return self


class ClockModel(SimBase):
    """Per-anchor clock error: sync residual redrawn each interval plus drift."""

    sync_error_std: float = Field(
        default=100e-6, ge=0, description="Std of the sync residual (s)."
    )
    drift_ppm: float = Field(
        default=0.0, ge=0, description="Bound on per-anchor drift rate (ppm)."
    )
    sync_interval: float = Field(
        default=32.0, gt=0, description="Time between resyncs (s)."
    )
    seed: int = Field(default=0, ge=0, description="Seed for residual draws.")


class AnchorConfig(SimBase):
    id: int = Field(..., ge=0, le=MAX_BEACON_ID, description="Beacon id.")
    position: Position = Field(..., description="Anchor position U_i (m).")
    amplitude: float = Field(
        default=0.5, ge=0, description="Transmit amplitude of one transducer."
    )
    transducers: int = Field(
        default=1, ge=1, le=8, description="Transducers driven in phase."
    )

    @property
    def tx_amplitude(self) -> float:
        return self.amplitude * self.transducers


class CBeaconConfig(SimBase):
    position: Position = Field(..., description="Speaker position (m).")
    f0: float = Field(default=45_000.0, gt=0, description="Sweep start (Hz).")
    bandwidth: float = Field(default=10_000.0, gt=0, description="Sweep width (Hz).")
    period_s: float = Field(default=0.1, gt=0, description="Sweep period (s).")
    amplitude: float = Field(default=1.0, ge=0, description="Transmit amplitude.")

    def chirp(self, rate: float) -> ChirpParams:
        return ChirpParams.from_sweep(
            self.f0, self.bandwidth, self.period_s, rate, self.amplitude
        )


class ReceiverConfig(SimBase):
    primary: Position = Field(..., description="Primary (bottom) mic position.")
    secondary: Position | None = Field(
        default=None,
        description="Secondary mic position; 10 cm above the primary when omitted.",
    )
    primary_shadow_db: float = Field(
        default=0.0,
        ge=0,
        description="Attenuation of ultrasonic arrivals at the primary mic.",
    )
    detection_mic: Literal["primary", "secondary", "turbo"] = Field(
        default="primary",
        description="Channel fed to the detector; 'turbo' enhances the secondary.",
    )

    @property
    def secondary_position(self) -> Position:
        if self.secondary is not None:
            return self.secondary
        x, y, z = self.primary
        return (x, y, z + DEFAULT_MIC_SEPARATION)

    @property
    def separation(self) -> float:
        return float(
            np.linalg.norm(np.subtract(self.secondary_position, self.primary))
        )

    @model_validator(mode="after")
    def _check_dual_mic(self) -> ReceiverConfig:
        if self.detection_mic == "turbo" and self.separation <= 0:
            raise ValueError("Dual-mic processing needs a non-zero mic separation")
        return self


class EchoPath(SimBase):
    delay_s: float = Field(..., gt=0, description="Extra delay over the LOS (s).")
    amplitude: float = Field(
        ..., ge=0, le=1, description="Amplitude relative to the LOS path."
    )


class ChannelConfig(SimBase):
    echoes: list[EchoPath] = Field(default_factory=list)
    absorption_db_per_m: float = Field(
        default=0.0, ge=0, description="Broadband air absorption (dB/m)."
    )


class ScheduleConfig(SimBase):
    slot_ms: float = Field(default=100.0, gt=0, description="Slot length (ms).")
    groups: list[list[int]] = Field(
        default_factory=list,
        description="Anchor ids that share one slot (spatially separated).",
    )


class LocatorConfig(SimBase):
    dims: Literal[2, 3] = Field(default=3, description="Solve in 2D or 3D.")
    height: float | None = Field(
        default=None,
        description="Fixed receiver height for 2D; defaults to the primary mic z.",
    )
    reject_outliers: bool = Field(
        default=False, description="Drop residuals above 3x the median once."
    )
    max_iterations: int = Field(default=100, ge=1)
    step_tolerance: float = Field(default=1e-9, gt=0)
    max_residual_m: float | None = Field(
        default=0.25,
        gt=0,
        description="Residual RMS above which a settled fix is not converged.",
    )


class Scenario(SimBase):
    """Everything needed to render a recording and localize from it."""

    schema_version: int = Field(default=1, description="Scenario file version.")
    name: str = Field(default="scenario")
    seed: int = Field(default=0, ge=0, description="Root seed for all randomness.")
    speed_of_sound: float = Field(default=DEFAULT_SPEED_OF_SOUND, gt=0)
    internal_rate: float = Field(default=DEFAULT_INTERNAL_RATE, gt=0)
    snr_db: float | None = Field(
        default=None,
        description=(
            "Ambient noise level referenced to the strongest downconverted "
            "component at the primary mic; null disables noise."
        ),
    )
    rounds: int = Field(default=1, ge=1, description="Schedule rounds to render.")
    duration_s: float | None = Field(
        default=None, gt=0, description="Capture length; defaults to the rounds."
    )
    cbeacon: CBeaconConfig | None = None
    receiver: ReceiverConfig
    frame: FrameTiming = Field(default_factory=FrameTiming)
    mic: MicNonlinearity = Field(default_factory=MicNonlinearity)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    clock: ClockModel = Field(default_factory=lambda: ClockModel(sync_error_std=0.0))
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    detector: dict[str, Any] = Field(
        default_factory=dict, description="DetectorConfig overrides."
    )
    locator: LocatorConfig = Field(default_factory=LocatorConfig)
    anchors: list[AnchorConfig] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_consistency(self) -> Scenario:
        ids = [a.id for a in self.anchors]
        if len(ids) != len(set(ids)):
            raise ValueError(f"Anchor ids must be distinct, got {sorted(ids)}")
        ratio = self.internal_rate / self.mic.adc_rate
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError(
                f"internal_rate {self.internal_rate} is not an integer multiple "
                f"of adc_rate {self.mic.adc_rate}"
            )
        known = set(ids)
        for group in self.schedule.groups:
            unknown = set(group) - known
            if unknown:
                raise ValueError(f"Schedule group names unknown anchors {unknown}")
        return self

    @property
    def decimation(self) -> int:
        return int(round(self.internal_rate / self.mic.adc_rate))

    def anchor_map(self) -> dict[int, Position]:
        return {a.id: a.position for a in self.anchors}

    def locator_height(self) -> float:
        if self.locator.height is not None:
            return self.locator.height
        return self.receiver.primary[2]
