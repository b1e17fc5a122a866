"""
Dual-microphone Wiener enhancement.

Ambient noise reaches both microphones with nearly the same PSD while the
ultrasonic beacons arrive much stronger at the secondary one, so the in-band
PSD gap between the channels tells beacon frames from noise frames. Noise
frames drive a recursive noise-PSD estimate; the secondary channel is then
scaled by a floored Wiener gain.
"""

import logging

import numpy as np
from scipy.signal import istft, stft

from src.core.exceptions import InsufficientDataError, SignalMismatchError
from src.models.detection import DetectorConfig
from src.models.sample_buffer import SampleBuffer

logger = logging.getLogger(__name__)

_EPS = 1e-20


def _spectra(
    x: SampleBuffer, cfg: DetectorConfig
) -> tuple[np.ndarray, np.ndarray]:
    freqs, _, spec = stft(
        x.samples,
        fs=x.rate,
        window="hann",
        nperseg=cfg.stft_nperseg,
        noverlap=cfg.stft_noverlap,
    )
    return freqs, spec


def _check_pair(primary: SampleBuffer, secondary: SampleBuffer, nperseg: int) -> None:
    if primary.rate != secondary.rate:
        raise SignalMismatchError(
            "Microphone channels must share one rate",
            expected=primary.rate,
            actual=secondary.rate,
        )
    if len(primary) != len(secondary):
        raise SignalMismatchError(
            "Microphone channels must be equally long",
            expected=len(primary),
            actual=len(secondary),
        )
    if len(primary) < nperseg:
        raise InsufficientDataError(
            "Audio is shorter than one STFT frame",
            needed=nperseg,
            available=len(primary),
        )


def psd_gap_db(
    primary: SampleBuffer, secondary: SampleBuffer, cfg: DetectorConfig
) -> np.ndarray:
    """Per-frame in-band mean PSD of the secondary over the primary, in dB."""
    _check_pair(primary, secondary, cfg.stft_nperseg)
    freqs, spec_p = _spectra(primary, cfg)
    _, spec_s = _spectra(secondary, cfg)
    low, high = cfg.band
    band = (freqs >= low) & (freqs <= high)
    p_pri = np.mean(np.abs(spec_p[band]) ** 2, axis=0)
    p_sec = np.mean(np.abs(spec_s[band]) ** 2, axis=0)
    return np.asarray(10.0 * np.log10((p_sec + _EPS) / (p_pri + _EPS)))


def classify_frames(
    primary: SampleBuffer, secondary: SampleBuffer, cfg: DetectorConfig
) -> np.ndarray:
    """True where a frame looks like noise only (PSD gap below the gate)."""
    return psd_gap_db(primary, secondary, cfg) < cfg.psd_gate_db


def turbocharge(
    primary: SampleBuffer, secondary: SampleBuffer, cfg: DetectorConfig
) -> SampleBuffer:
    noise_frames = classify_frames(primary, secondary, cfg)
    _, spec = _spectra(secondary, cfg)
    power = np.abs(spec) ** 2

    if noise_frames.any():
        noise = np.median(power[:, noise_frames], axis=1)
    else:
        logger.warning("No noise-only frame found; seeding the noise PSD from all")
        noise = np.median(power, axis=1)
    if noise_frames.all():
        logger.info("PSD gate never opened; every frame treated as noise")

    alpha = cfg.noise_smoothing
    gains = np.empty_like(power)
    for j in range(power.shape[1]):
        if noise_frames[j]:
            noise = alpha * noise + (1.0 - alpha) * power[:, j]
        gains[:, j] = np.maximum(1.0 - noise / (power[:, j] + _EPS), cfg.wiener_floor)

    _, enhanced = istft(
        spec * gains,
        fs=secondary.rate,
        window="hann",
        nperseg=cfg.stft_nperseg,
        noverlap=cfg.stft_noverlap,
    )
    enhanced = np.real(enhanced)[: len(secondary)]
    if enhanced.size < len(secondary):
        enhanced = np.pad(enhanced, (0, len(secondary) - enhanced.size))
    logger.info(
        f"Turbocharged secondary: {int((~noise_frames).sum())}/{noise_frames.size} "
        "beacon frame(s)"
    )
    return secondary.with_samples(enhanced)
