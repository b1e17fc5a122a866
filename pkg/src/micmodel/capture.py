"""The microphone as a downconverter: nonlinearity, anti-alias filter, ADC."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.signal import periodogram

from src.core.tables import write_table
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import MicNonlinearity

from .adc import lpf_and_decimate, quantize_pcm16
from .nonlinearity import apply_nonlinearity

logger = logging.getLogger(__name__)

_POWER_FLOOR = 1e-30


def spectrum_frame(x: SampleBuffer) -> pd.DataFrame:
    """One-sided periodogram in dB, floored to keep silent bins finite."""
    freqs, pxx = periodogram(x.samples, fs=x.rate, window="hann")
    return pd.DataFrame(
        {
            "frequency_hz": freqs,
            "power_db": 10.0 * np.log10(np.maximum(pxx, _POWER_FLOOR)),
        }
    )


def capture(
    acoustic: SampleBuffer,
    m: MicNonlinearity,
    spectrum_path: Path | None = None,
) -> SampleBuffer:
    """
    Acoustic pressure at the internal rate to audio at the ADC rate.

    With ``spectrum_path`` the pre-filter spectrum is written as a CSV table.
    """
    amplified = apply_nonlinearity(acoustic, m)
    if spectrum_path is not None and len(amplified):
        write_table(spectrum_path, "spectrum", spectrum_frame(amplified))
    audio = lpf_and_decimate(amplified, m)
    if m.quantize_16bit:
        audio = quantize_pcm16(audio)
    logger.debug(f"Captured {len(audio)} samples at {audio.rate:.0f} Hz")
    return audio
