"""
Free-field propagation between a source and a microphone.

Buffers live on the absolute sample grid ``k / rate``: a buffer whose ``t0``
is not a whole number of samples is interpreted as band-limited and
resampled onto the grid by the fractional-delay filter.
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy.signal import oaconvolve
from scipy.signal.windows import blackman

from src.core.exceptions import SignalMismatchError
from src.models.base import Position
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import EchoPath

logger = logging.getLogger(__name__)

FRACTIONAL_DELAY_TAPS = 31
NEAR_FIELD_CLAMP_M = 0.1

_HALF = FRACTIONAL_DELAY_TAPS // 2
_SNAP = 1e-9


def fractional_delay_taps(frac: float) -> np.ndarray:
    """Blackman-windowed sinc delaying by ``_HALF + frac`` samples, unit DC gain."""
    j = np.arange(FRACTIONAL_DELAY_TAPS)
    taps = np.sinc(j - _HALF - frac) * blackman(FRACTIONAL_DELAY_TAPS)
    return taps / taps.sum()


def path_gain(
    distance: float,
    absorption_db_per_m: float = 0.0,
    d_ref: float = NEAR_FIELD_CLAMP_M,
) -> float:
    """Spherical spreading with a near-field clamp, times broadband absorption."""
    spreading = 1.0 / max(distance, d_ref)
    return spreading * 10.0 ** (-absorption_db_per_m * distance / 20.0)


def delay_buffer(src: SampleBuffer, delay_s: float, gain: float = 1.0) -> SampleBuffer:
    """
    Delay by ``delay_s`` onto the absolute grid.

    The result starts ``_HALF`` samples before the integer part of the delay
    and keeps the full convolution, so no energy is cut.
    """
    total = (src.t0 + delay_s) * src.rate
    nearest = round(total)
    if abs(total - nearest) < _SNAP:
        total = float(nearest)
    whole = int(np.floor(total))
    frac = total - whole
    if len(src) == 0:
        return SampleBuffer.zeros(0, src.rate, whole / src.rate)
    if frac == 0.0:
        samples = np.concatenate(
            [np.zeros(_HALF), src.samples * gain, np.zeros(_HALF)]
        )
    else:
        samples = gain * oaconvolve(src.samples, fractional_delay_taps(frac))
    return SampleBuffer(samples, src.rate, (whole - _HALF) / src.rate)


def propagate(
    src: SampleBuffer,
    src_pos: Position,
    dst_pos: Position,
    c: float,
    echoes: Sequence[EchoPath] = (),
    absorption_db_per_m: float = 0.0,
) -> SampleBuffer:
    """Line-of-sight copy plus one attenuated copy per echo path."""
    if not c > 0:
        raise ValueError(f"Speed of sound must be positive, got {c}")
    if not (np.all(np.isfinite(src_pos)) and np.all(np.isfinite(dst_pos))):
        raise ValueError("Source and destination positions must be finite")

    distance = float(np.linalg.norm(np.subtract(dst_pos, src_pos)))
    delay = distance / c
    gain = path_gain(distance, absorption_db_per_m)
    paths = [delay_buffer(src, delay, gain)]
    for echo in echoes:
        paths.append(delay_buffer(src, delay + echo.delay_s, gain * echo.amplitude))
    logger.debug(
        f"Path {distance:.3f} m: delay {delay * 1e3:.4f} ms, gain {gain:.4g}, "
        f"{len(echoes)} echo(es)"
    )
    return paths[0] if len(paths) == 1 else mix(paths)


def _start_index(buf: SampleBuffer) -> int:
    return int(round(buf.t0 * buf.rate))


def mix(buffers: Sequence[SampleBuffer]) -> SampleBuffer:
    """Sum buffers on their common grid, zero-padding to the union span."""
    if not buffers:
        raise SignalMismatchError("Nothing to mix", expected=">= 1 buffer")
    rate = buffers[0].rate
    for buf in buffers[1:]:
        if buf.rate != rate:
            raise SignalMismatchError(
                "Mixed buffers must share one rate", expected=rate, actual=buf.rate
            )
    if len(buffers) == 1:
        return buffers[0]

    starts = [_start_index(b) for b in buffers]
    first = min(starts)
    stop = max(s + len(b) for s, b in zip(starts, buffers, strict=True))
    out = np.zeros(stop - first)
    for start, buf in zip(starts, buffers, strict=True):
        out[start - first : start - first + len(buf)] += buf.samples
    return SampleBuffer(out, rate, buffers[starts.index(first)].t0)


def align_to(buf: SampleBuffer, t0: float, n: int) -> SampleBuffer:
    """Exactly ``n`` samples starting at grid time ``t0``; zero outside ``buf``."""
    out = np.zeros(int(n))
    offset = _start_index(buf) - int(round(t0 * buf.rate))
    lo = max(offset, 0)
    hi = min(offset + len(buf), out.size)
    if hi > lo:
        out[lo:hi] = buf.samples[lo - offset : hi - offset]
    return SampleBuffer(out, buf.rate, t0)


def noise_std_for(signal_power: float, snr_db: float) -> float:
    """White-noise standard deviation giving ``snr_db`` against a power."""
    if np.isinf(snr_db) and snr_db > 0:
        return 0.0
    return float(np.sqrt(signal_power / 10.0 ** (snr_db / 10.0)))


def add_white_noise(
    x: SampleBuffer, std: float, seed: int | np.random.SeedSequence
) -> SampleBuffer:
    if std <= 0:
        return x
    rng = np.random.default_rng(seed)
    return x.with_samples(x.samples + rng.normal(0.0, std, len(x)))


def add_noise(
    x: SampleBuffer,
    snr_db: float | None,
    seed: int | np.random.SeedSequence,
    reference_power: float | None = None,
) -> SampleBuffer:
    """
    Add Gaussian white noise at ``snr_db`` relative to the buffer's own power,
    or to ``reference_power`` when given. ``None`` or ``+inf`` disables noise.
    """
    if len(x) == 0:
        raise SignalMismatchError("Cannot add noise to an empty buffer")
    if snr_db is None or (np.isinf(snr_db) and snr_db > 0):
        return x
    power = x.power() if reference_power is None else reference_power
    if power <= 0:
        logger.warning("Noise reference power is zero; leaving the buffer clean")
        return x
    return add_white_noise(x, noise_std_for(power, snr_db), seed)
