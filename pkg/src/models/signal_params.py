from __future__ import annotations

import math

from pydantic import Field, model_validator

from src.core.exceptions import ConfigurationError, NyquistError

from .base import SimBase

ID_BITS = 7
FIELD_BITS = ID_BITS + 1
MAX_BEACON_ID = (1 << ID_BITS) - 1


class ChirpParams(SimBase):
    """
    A periodic linear sweep in sample units.

    The instantaneous frequency rises by ``delta_f`` per sample from ``f0`` and
    wraps back every ``period_k`` samples.
    """

    f0: float = Field(..., gt=0, description="Start frequency of each sweep (Hz).")
    delta_f: float = Field(
        ..., gt=0, description="Frequency increment per sample (Hz/sample)."
    )
    period_k: int = Field(..., gt=0, description="Sweep period K in samples.")
    amplitude: float = Field(default=1.0, ge=0, description="Peak amplitude.")

    @property
    def bandwidth(self) -> float:
        return self.period_k * self.delta_f

    @property
    def f_end(self) -> float:
        return self.f0 + self.bandwidth

    def period_s(self, rate: float) -> float:
        return self.period_k / rate

    def slope(self, rate: float) -> float:
        """Sweep rate in Hz per second."""
        return self.delta_f * rate

    def check_nyquist(self, rate: float, what: str = "Chirp") -> None:
        if not rate > 2 * self.f_end:
            raise NyquistError(what, (self.f0, self.f_end), rate)

    def at_rate(self, rate: float, new_rate: float) -> ChirpParams:
        """The same physical sweep expressed at another sample rate."""
        k = self.period_k * new_rate / rate
        if abs(k - round(k)) > 1e-6 or round(k) < 1:
            raise ConfigurationError(
                "Chirp period is not a whole number of samples at the new rate",
                field_name="period_k",
                expected="integer period after rate change",
                actual=k,
            )
        period_k = int(round(k))
        return ChirpParams(
            f0=self.f0,
            delta_f=self.bandwidth / period_k,
            period_k=period_k,
            amplitude=self.amplitude,
        )

    def shifted(self, offset_hz: float) -> ChirpParams:
        """Same sweep translated in frequency (e.g. after downconversion)."""
        return self.model_copy(update={"f0": self.f0 + offset_hz})

    @classmethod
    def from_sweep(
        cls,
        f0: float,
        bandwidth: float,
        period_s: float,
        rate: float,
        amplitude: float = 1.0,
    ) -> ChirpParams:
        period_k = int(round(period_s * rate))
        if period_k < 1:
            raise ConfigurationError(
                "Sweep period shorter than one sample",
                field_name="period_s",
                expected=f">= {1 / rate}",
                actual=period_s,
            )
        return cls(
            f0=f0,
            delta_f=bandwidth / period_k,
            period_k=period_k,
            amplitude=amplitude,
        )


def parity_bit(beacon_id: int) -> int:
    """Even parity over the 7 data bits."""
    return bin(beacon_id).count("1") % 2


def id_to_bits(beacon_id: int) -> tuple[int, ...]:
    """7 data bits MSB first followed by the parity bit."""
    data = tuple((beacon_id >> (ID_BITS - 1 - i)) & 1 for i in range(ID_BITS))
    return data + (parity_bit(beacon_id),)


def bits_to_id(bits: tuple[int, ...] | list[int]) -> tuple[int, bool]:
    """Inverse of :func:`id_to_bits`; returns the id and the parity check."""
    if len(bits) != FIELD_BITS:
        raise ValueError(f"Expected {FIELD_BITS} bits, got {len(bits)}")
    beacon_id = 0
    for bit in bits[:ID_BITS]:
        beacon_id = (beacon_id << 1) | (int(bit) & 1)
    parity_ok = sum(int(b) & 1 for b in bits) % 2 == 0
    return beacon_id, parity_ok


class BeaconFrame(SimBase):
    """
    One uBeacon transmission: a continuous preamble, eight FM0-coded bits
    (7-bit id plus even parity) and a silent guard.
    """

    id: int = Field(..., ge=0, le=MAX_BEACON_ID, description="Beacon id.")
    preamble_ms: float = Field(default=30.0, gt=0, description="Preamble (ms).")
    bit_ms: float = Field(default=5.0, gt=0, description="Duration of one bit (ms).")
    guard_ms: float = Field(default=30.0, ge=0, description="Trailing silence (ms).")
    carrier_freq: float = Field(default=40_000.0, gt=0, description="Carrier (Hz).")

    @property
    def bits(self) -> tuple[int, ...]:
        return id_to_bits(self.id)

    @property
    def id_field_ms(self) -> float:
        return FIELD_BITS * self.bit_ms

    @property
    def duration_ms(self) -> float:
        return self.preamble_ms + self.id_field_ms + self.guard_ms

    @property
    def duration_s(self) -> float:
        return self.duration_ms / 1000.0


class FrameTiming(SimBase):
    """Frame timing shared by every anchor of a deployment."""

    preamble_ms: float = Field(default=30.0, gt=0, description="Preamble (ms).")
    bit_ms: float = Field(default=5.0, gt=0, description="Duration of one bit (ms).")
    guard_ms: float = Field(default=30.0, ge=0, description="Trailing silence (ms).")
    carrier_freq: float = Field(default=40_000.0, gt=0, description="Carrier (Hz).")

    @model_validator(mode="after")
    def _finite(self) -> FrameTiming:
        for name in ("preamble_ms", "bit_ms", "guard_ms", "carrier_freq"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        return self

    @property
    def id_field_ms(self) -> float:
        return FIELD_BITS * self.bit_ms

    @property
    def on_air_ms(self) -> float:
        """Preamble plus id field; the guard carries no energy."""
        return self.preamble_ms + self.id_field_ms

    def frame(self, beacon_id: int) -> BeaconFrame:
        return BeaconFrame(id=beacon_id, **self.model_dump())
