"""Transmit-side waveform generators: cBeacon chirp, uBeacon frames, CW."""

import logging

import numpy as np

from src.core.exceptions import NyquistError
from src.models.sample_buffer import SampleBuffer
from src.models.signal_params import BeaconFrame, ChirpParams

from .fm0 import fm0_encode

logger = logging.getLogger(__name__)


def chirp_phase(m: np.ndarray, params: ChirpParams, rate: float) -> np.ndarray:
    """Phase (rad) at sweep-local sample index ``m`` in [0, K)."""
    return 2.0 * np.pi * (params.f0 * m + 0.5 * params.delta_f * m * m) / rate


def sweep_index(n: int, params: ChirpParams, start_index: int) -> np.ndarray:
    return (np.arange(n, dtype=np.int64) + start_index) % params.period_k


def gen_chirp(
    params: ChirpParams, rate: float, duration: float, t0: float = 0.0
) -> SampleBuffer:
    """
    Periodic chirp whose sweep restarts every ``period_k`` samples of the
    absolute time grid, so two renders of overlapping spans agree sample for
    sample.
    """
    params.check_nyquist(rate, "Chirp")
    n = int(round(duration * rate))
    m = sweep_index(n, params, int(round(t0 * rate)))
    samples = params.amplitude * np.cos(chirp_phase(m, params, rate))
    logger.debug(
        f"Chirp {params.f0:.0f}-{params.f_end:.0f} Hz, {n} samples at t0={t0:.6f}"
    )
    return SampleBuffer(samples, rate, t0)


def gen_cw(
    freq: float, amplitude: float, rate: float, duration: float, t0: float = 0.0
) -> SampleBuffer:
    if not rate > 2 * freq:
        raise NyquistError("Continuous wave", (freq, freq), rate)
    n = int(round(duration * rate))
    t = t0 + np.arange(n) / rate
    return SampleBuffer(amplitude * np.cos(2.0 * np.pi * freq * t), rate, t0)


def frame_envelope(frame: BeaconFrame, rate: float) -> np.ndarray:
    """On/off envelope of a whole frame: preamble, FM0 id field, guard."""
    n_pre = int(round(frame.preamble_ms * rate / 1000.0))
    n_total = int(round(frame.duration_ms * rate / 1000.0))
    id_mask = fm0_encode(frame.bits, frame.bit_ms, rate).samples
    envelope = np.zeros(n_total)
    envelope[:n_pre] = 1.0
    stop = min(n_pre + id_mask.size, n_total)
    envelope[n_pre:stop] = id_mask[: stop - n_pre]
    return envelope


def gen_ubeacon_frame(
    frame: BeaconFrame, rate: float, t0: float = 0.0, amplitude: float = 1.0
) -> SampleBuffer:
    """Carrier gated by the frame envelope; the frame starts exactly at t0."""
    if not rate > 2 * frame.carrier_freq:
        raise NyquistError(
            "uBeacon carrier", (frame.carrier_freq, frame.carrier_freq), rate
        )
    envelope = frame_envelope(frame, rate)
    k = np.arange(envelope.size)
    carrier = np.cos(2.0 * np.pi * frame.carrier_freq * k / rate)
    return SampleBuffer(amplitude * envelope * carrier, rate, t0)
