from __future__ import annotations

from typing import TYPE_CHECKING

from pydantic import Field, model_validator

from .base import SimBase
from .signal_params import FIELD_BITS

if TYPE_CHECKING:
    from .scenario import Scenario


class DetectorConfig(SimBase):
    """
    Receiver settings in the downconverted (ADC-rate) domain.

    ``delta_f`` and ``period_k`` describe the chirp as it appears after the
    microphone: same slope as the cBeacon, band shifted down by the uBeacon
    carrier, period counted in ADC samples.
    """

    adc_rate: float = Field(default=44_100.0, gt=0, description="Audio rate (Hz).")
    f_diff: float = Field(
        default=5_000.0, gt=0, description="Downconverted band start f_c - f_u (Hz)."
    )
    delta_f: float = Field(
        default=10_000.0 / 4410, gt=0, description="Increment per ADC sample (Hz)."
    )
    period_k: int = Field(default=4410, gt=0, description="Period in ADC samples.")
    preamble_ms: float = Field(default=30.0, gt=0)
    bit_ms: float = Field(default=5.0, gt=0)
    guard_ms: float = Field(default=30.0, ge=0)
    slot_ms: float = Field(default=100.0, gt=0)
    psd_gate_db: float = Field(
        default=10.0, description="Inter-mic in-band PSD gap that marks a beacon."
    )
    peak_threshold: float = Field(
        default=8.0, gt=1, description="Peak-to-median ratio for a detection."
    )
    floor_offset_hz: float = Field(
        default=-2_500.0,
        description="Offset of the reference used to measure the noise floor.",
    )
    stft_nperseg: int = Field(default=1024, ge=16)
    stft_noverlap: int = Field(default=512, ge=0)
    noise_smoothing: float = Field(
        default=0.9, ge=0, lt=1, description="Recursive noise-PSD forgetting factor."
    )
    wiener_floor: float = Field(default=0.1, ge=0, le=1)

    @model_validator(mode="after")
    def _check_band_and_slot(self) -> DetectorConfig:
        low, high = self.band
        if not (0 < low and high < self.adc_rate / 2):
            raise ValueError(
                f"Downconverted band {low:.0f}-{high:.0f} Hz must lie inside "
                f"(0, {self.adc_rate / 2:.0f}) Hz"
            )
        slot = self.slot_ms * self.adc_rate / 1000.0
        if abs(slot - round(slot)) > 1e-6:
            raise ValueError(f"slot_ms gives a non-integer sample count {slot}")
        if self.stft_noverlap >= self.stft_nperseg:
            raise ValueError("stft_noverlap must be smaller than stft_nperseg")
        return self

    @property
    def band(self) -> tuple[float, float]:
        return self.f_diff, self.f_diff + self.period_k * self.delta_f

    @property
    def preamble_samples(self) -> int:
        return int(round(self.preamble_ms * self.adc_rate / 1000.0))

    @property
    def bit_samples(self) -> float:
        return self.bit_ms * self.adc_rate / 1000.0

    @property
    def id_field_samples(self) -> float:
        return FIELD_BITS * self.bit_samples

    @property
    def slot_samples(self) -> int:
        return int(round(self.slot_ms * self.adc_rate / 1000.0))

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> DetectorConfig:
        """Mirror a deployment's chirp and frame settings into the audio domain."""
        adc = scenario.mic.adc_rate
        values: dict[str, object] = {
            "adc_rate": adc,
            "preamble_ms": scenario.frame.preamble_ms,
            "bit_ms": scenario.frame.bit_ms,
            "guard_ms": scenario.frame.guard_ms,
            "slot_ms": scenario.schedule.slot_ms,
        }
        if scenario.cbeacon is not None:
            chirp = scenario.cbeacon.chirp(scenario.internal_rate).at_rate(
                scenario.internal_rate, adc
            )
            values.update(
                f_diff=chirp.f0 - scenario.frame.carrier_freq,
                delta_f=chirp.delta_f,
                period_k=chirp.period_k,
            )
        values.update(scenario.detector)
        return cls.model_validate(values)


class Detection(SimBase):
    """A preamble found in audio, optionally with its decoded id."""

    b_start: float = Field(..., description="Refined preamble start B_i (samples).")
    gamma: int = Field(..., ge=0, description="Global chirp offset used (samples).")
    period_k: int = Field(
        default=4410, gt=0, description="Chirp period the offset is taken modulo."
    )
    tau: int = Field(..., ge=0, description="Integer correlation peak index.")
    id: int | None = Field(default=None, description="Decoded 7-bit id.")
    parity_ok: bool = Field(default=False)
    peak_score: float = Field(..., ge=0, description="Peak-to-floor ratio.")
    coherence: float = Field(
        default=0.0, ge=0, description="Energy-normalized correlation at the peak."
    )

    @model_validator(mode="after")
    def _check_offset_and_id(self) -> Detection:
        if self.gamma >= self.period_k:
            raise ValueError(
                f"gamma {self.gamma} must be below the chirp period {self.period_k}"
            )
        if self.id is not None and not self.parity_ok:
            raise ValueError("A detection carrying an id must have passed parity")
        return self


class ToaEstimate(SimBase):
    anchor_id: int
    toa_s: float = Field(..., description="ToA relative to the earliest beacon (s).")
    b_start: float
    peak_score: float
