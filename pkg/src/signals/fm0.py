"""
FM0 (bi-phase space) line coding of the beacon id field.

Every bit boundary toggles the level; a data-0 toggles again at mid-bit, a
data-1 does not. The level before the first bit is the preamble's on-level,
so the id field always opens with an off half-bit.
"""

from collections.abc import Sequence

import numpy as np

from src.models.sample_buffer import SampleBuffer


def half_bit_levels(bits: Sequence[int], initial_level: int = 1) -> list[int]:
    """On/off level of each half-bit, two per bit."""
    level = int(initial_level) & 1
    halves: list[int] = []
    for bit in bits:
        level ^= 1
        halves.append(level)
        if int(bit) == 0:
            level ^= 1
        halves.append(level)
    return halves


def bits_from_half_levels(halves: Sequence[int]) -> list[int]:
    """A mid-bit change means 0, no change means 1."""
    if len(halves) % 2:
        raise ValueError("Half-bit levels come in pairs")
    return [
        0 if int(halves[i]) != int(halves[i + 1]) else 1
        for i in range(0, len(halves), 2)
    ]


def half_bit_edges(
    n_bits: int, bit_samples: float, offset: float = 0.0
) -> np.ndarray:
    """Sample indices of the 2*n_bits + 1 half-bit boundaries."""
    j = np.arange(2 * n_bits + 1)
    return np.rint(offset + j * bit_samples / 2.0).astype(np.int64)


def fm0_encode(
    bits: Sequence[int], bit_ms: float, rate: float, initial_level: int = 1
) -> SampleBuffer:
    """On/off baseband mask of the coded bits."""
    if bit_ms <= 0:
        raise ValueError(f"bit_ms must be positive, got {bit_ms}")
    edges = half_bit_edges(len(bits), bit_ms * rate / 1000.0)
    mask = np.zeros(int(edges[-1]))
    for level, start, stop in zip(
        half_bit_levels(bits, initial_level), edges[:-1], edges[1:], strict=True
    ):
        mask[start:stop] = level
    return SampleBuffer(mask, rate, 0.0)


def fm0_decode(mask: SampleBuffer, bit_ms: float, n_bits: int = 8) -> list[int]:
    """Recover bits from a (possibly noisy) on/off mask."""
    edges = half_bit_edges(n_bits, bit_ms * mask.rate / 1000.0)
    if edges[-1] > len(mask):
        raise ValueError(
            f"Mask holds {len(mask)} samples, {n_bits} bits need {edges[-1]}"
        )
    halves = [
        int(np.mean(mask.samples[start:stop]) >= 0.5)
        for start, stop in zip(edges[:-1], edges[1:], strict=True)
    ]
    return bits_from_half_levels(halves)
