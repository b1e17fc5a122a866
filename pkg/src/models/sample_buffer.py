"""The sampled-waveform container shared by every module."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.exceptions import ConfigurationError


@dataclass(frozen=True, eq=False)
class SampleBuffer:
    """
    A uniformly sampled real waveform.

    Sample ``k`` sits at time ``t0 + k / rate``. The samples array is stored as
    contiguous float64 and never modified in place by library code.
    """

    samples: np.ndarray
    rate: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ConfigurationError(
                "Sample rate must be positive",
                field_name="rate",
                expected="> 0",
                actual=self.rate,
            )
        data = np.ascontiguousarray(self.samples, dtype=np.float64)
        if data.ndim != 1:
            raise ConfigurationError(
                "SampleBuffer holds a single channel",
                field_name="samples",
                expected="1-D array",
                actual=data.shape,
            )
        object.__setattr__(self, "samples", data)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        return len(self) / self.rate

    @property
    def end(self) -> float:
        """Time just after the last sample."""
        return self.t0 + self.duration

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self)) / self.rate

    def index_of(self, t: float) -> float:
        """Fractional sample index of absolute time ``t``."""
        return (t - self.t0) * self.rate

    def with_samples(self, samples: np.ndarray) -> SampleBuffer:
        """New buffer on the same time axis."""
        return SampleBuffer(samples, self.rate, self.t0)

    def scaled(self, gain: float) -> SampleBuffer:
        return self.with_samples(self.samples * gain)

    def shifted(self, dt: float) -> SampleBuffer:
        return SampleBuffer(self.samples, self.rate, self.t0 + dt)

    def slice(self, start: int, stop: int | None = None) -> SampleBuffer:
        """Sub-buffer by sample index, keeping absolute timing."""
        start = max(int(start), 0)
        stop = len(self) if stop is None else min(int(stop), len(self))
        return SampleBuffer(
            self.samples[start:stop], self.rate, self.t0 + start / self.rate
        )

    def power(self) -> float:
        """Mean square value; zero for an empty buffer."""
        if len(self) == 0:
            return 0.0
        return float(np.mean(self.samples**2))

    @classmethod
    def zeros(cls, n: int, rate: float, t0: float = 0.0) -> SampleBuffer:
        return cls(np.zeros(int(n)), rate, t0)
