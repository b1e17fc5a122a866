"""FM0 id decoding on the dechirped envelope."""

import logging

import numpy as np

from src.models.detection import Detection, DetectorConfig
from src.models.sample_buffer import SampleBuffer
from src.models.signal_params import FIELD_BITS, bits_to_id
from src.signals.fm0 import bits_from_half_levels, half_bit_edges

from .correlation import DynamicChirpCorrelator

logger = logging.getLogger(__name__)

# Share of each half-bit skipped at either end before averaging.
TRIM_FRACTION = 0.1


def _window_means(
    csum: np.ndarray,
    start: float,
    bit_samples: float,
    guard: int,
    with_preamble_tail: bool = False,
) -> np.ndarray:
    edges = half_bit_edges(FIELD_BITS, bit_samples, start)
    if with_preamble_tail:
        tail = int(np.rint(start - bit_samples / 2.0))
        edges = np.concatenate([[tail], edges])
    lo, hi = edges[:-1] + guard, edges[1:] - guard
    return (csum[hi] - csum[lo]) / (hi - lo)


def _cumulative(envelope: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(envelope)])


def _guard(bit_samples: float) -> int:
    half = bit_samples / 2.0
    return min(int(round(TRIM_FRACTION * half)), max(int(half) // 2 - 1, 0))


def half_bit_means(
    envelope: np.ndarray, start: float, bit_samples: float
) -> np.ndarray:
    """Mean envelope over the central part of each of the 16 half-bits."""
    return _window_means(
        _cumulative(envelope), start, bit_samples, _guard(bit_samples)
    )


def midpoint_threshold(
    levels: np.ndarray, initial: float = 0.5, iterations: int = 20
) -> float:
    """
    Iterative midpoint between the mean on and mean off levels. Falls back to
    ``initial`` when every level lands on one side.
    """
    threshold = initial
    for _ in range(iterations):
        high = levels[levels >= threshold]
        low = levels[levels < threshold]
        if high.size == 0 or low.size == 0:
            return initial
        updated = 0.5 * float(high.mean() + low.mean())
        if abs(updated - threshold) < 1e-9:
            break
        threshold = updated
    return threshold


def slice_half_bits(
    envelope: np.ndarray, start: float, bit_samples: float
) -> list[int]:
    """On/off decision per half-bit against this frame's own midpoint."""
    levels = half_bit_means(envelope, start, bit_samples)
    threshold = midpoint_threshold(levels)
    return [int(v >= threshold) for v in levels]


def align_id_field(envelope: np.ndarray, nominal: float, bit_samples: float) -> float:
    """
    Id field start within half a bit of ``nominal`` that leaves the
    half-bits most clearly on or off.

    Every FM0 bit boundary carries a level change, so a misaligned grid
    straddles transitions and loses margin over the whole field. The
    preamble tail must read on and the first half-bit off, which rules out
    the grid shifted by a whole half-bit. Ties go to the middle of the run.
    """
    csum = _cumulative(envelope)
    guard = _guard(bit_samples)
    half = max(int(round(bit_samples / 2.0)), 1)
    span = FIELD_BITS * bit_samples
    lowest = max(-half, int(np.ceil(bit_samples / 2.0 - nominal)))
    highest = min(half, int(np.floor(envelope.size - nominal - span)) - 1)
    if highest < lowest:
        return float(nominal)
    shifts = np.arange(lowest, highest + 1)
    margins = np.empty(shifts.size)
    for i, shift in enumerate(shifts):
        levels = _window_means(csum, nominal + shift, bit_samples, guard, True)
        margins[i] = (
            (levels[0] - 0.5)
            + (0.5 - levels[1])
            + float(np.abs(levels[2:] - 0.5).sum())
        )
    ties = shifts[margins >= margins.max() - 1e-9]
    return float(nominal + ties[(ties.size - 1) // 2])


def decode_bits(correlator: DynamicChirpCorrelator, det: Detection) -> list[int]:
    """The eight raw id-field bits after a preamble, parity bit last."""
    cfg = correlator.cfg
    envelope, _ = correlator.soft_envelope(det)
    start = align_id_field(envelope, cfg.preamble_samples, cfg.bit_samples)
    if start != cfg.preamble_samples:
        logger.debug(
            f"Id field re-aligned by {start - cfg.preamble_samples:+.0f} samples"
        )
    return bits_from_half_levels(slice_half_bits(envelope, start, cfg.bit_samples))


def decode_with(
    correlator: DynamicChirpCorrelator, det: Detection
) -> tuple[int | None, bool]:
    bits = decode_bits(correlator, det)
    beacon_id, parity_ok = bits_to_id(bits)
    if not parity_ok:
        logger.warning(
            f"Parity check failed for preamble at {det.b_start:.1f} (bits {bits})"
        )
        return None, False
    logger.debug(f"Decoded id {beacon_id} at {det.b_start:.1f}")
    return beacon_id, True


def decode_id(
    audio: SampleBuffer, det: Detection, cfg: DetectorConfig
) -> tuple[int | None, bool]:
    """
    Remove the chirp carrier with the continuing dynamic template, slice the
    id field into half-bits and check parity. A failed check yields no id.
    """
    return decode_with(DynamicChirpCorrelator(audio, cfg), det)
