"""
Anti-alias filter and ADC.

The FIR is a Kaiser-window design whose stopband edge is pinned at
``lpf_stopband`` with ``lpf_attenuation_db`` of design attenuation. The
transition width follows from the tap count, so the half-amplitude point sits
at ``lpf_stopband - width / 2`` unless ``lpf_cutoff`` is lower. With the
default 255 taps at 441 kHz the transition is about 6.9 kHz wide: the filter
cannot be flat to 22 kHz and 60 dB down at 25 kHz at the same time, and the
stopband edge wins.
"""

import logging
from functools import lru_cache

import numpy as np
from scipy.signal import firwin, kaiser_beta, oaconvolve

from src.core.exceptions import ConfigurationError
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import MicNonlinearity

logger = logging.getLogger(__name__)

PCM16_SCALE = 32768.0


def transition_width_hz(taps: int, attenuation_db: float, rate: float) -> float:
    """Kaiser's estimate of the transition width a tap budget affords."""
    width_rad = (attenuation_db - 7.95) / (2.285 * (taps - 1))
    return width_rad * rate / (2.0 * np.pi)


def effective_cutoff(m: MicNonlinearity, rate: float) -> float:
    width = transition_width_hz(m.lpf_taps, m.lpf_attenuation_db, rate)
    return min(m.lpf_cutoff, m.lpf_stopband - width / 2.0)


@lru_cache(maxsize=16)
def _kaiser_lowpass(
    taps: int, cutoff: float, attenuation_db: float, rate: float
) -> np.ndarray:
    h = firwin(
        taps, cutoff, window=("kaiser", kaiser_beta(attenuation_db)), fs=rate
    )
    h.setflags(write=False)
    return h


def design_lpf(m: MicNonlinearity, rate: float) -> np.ndarray:
    """Linear-phase low-pass taps for input sampled at ``rate``."""
    cutoff = effective_cutoff(m, rate)
    if cutoff <= 0:
        raise ConfigurationError(
            "Anti-alias filter has no passband left",
            field_name="lpf_taps",
            expected="more taps or a higher lpf_stopband",
            actual=m.lpf_taps,
        )
    return _kaiser_lowpass(m.lpf_taps, cutoff, m.lpf_attenuation_db, rate)


def noise_gain(m: MicNonlinearity, rate: float) -> float:
    """Fraction of white-noise power the filter passes (sum of squared taps)."""
    return float(np.sum(design_lpf(m, rate) ** 2))


def decimation_ratio(rate: float, adc_rate: float) -> int:
    ratio = rate / adc_rate
    if ratio < 1 or abs(ratio - round(ratio)) > 1e-9:
        raise ConfigurationError(
            "Input rate must be an integer multiple of the ADC rate",
            field_name="adc_rate",
            expected=f"a divisor of {rate:.0f} Hz",
            actual=adc_rate,
        )
    return int(round(ratio))


def lpf_and_decimate(x: SampleBuffer, m: MicNonlinearity) -> SampleBuffer:
    """Zero-phase-aligned FIR then every ratio-th sample; ``t0`` is preserved."""
    ratio = decimation_ratio(x.rate, m.adc_rate)
    if len(x) == 0:
        return SampleBuffer.zeros(0, m.adc_rate, x.t0)
    h = design_lpf(m, x.rate)
    filtered = oaconvolve(x.samples, h, mode="same")
    logger.debug(
        f"LPF {len(h)} taps at {effective_cutoff(m, x.rate):.0f} Hz, "
        f"decimating {x.rate:.0f} -> {m.adc_rate:.0f} Hz"
    )
    return SampleBuffer(filtered[::ratio], m.adc_rate, x.t0)


def quantize_pcm16(x: SampleBuffer) -> SampleBuffer:
    """Round to 16-bit PCM steps, clipping to the representable range."""
    steps = np.clip(np.round(x.samples * PCM16_SCALE), -PCM16_SCALE, PCM16_SCALE - 1)
    return x.with_samples(steps / PCM16_SCALE)
