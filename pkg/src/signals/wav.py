"""WAV import/export of sample buffers."""

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Literal

import numpy as np
import soundfile as sf

from src.core.exceptions import SignalMismatchError
from src.models.sample_buffer import SampleBuffer

logger = logging.getLogger(__name__)

WavFormat = Literal["float", "pcm16"]

_SUBTYPES: dict[str, str] = {"float": "FLOAT", "pcm16": "PCM_16"}
_PCM16_MAX = 32767 / 32768


def write_wav(
    path: Path, channels: Sequence[SampleBuffer], fmt: WavFormat = "float"
) -> Path:
    """
    Write one or more equally long buffers as a little-endian WAV file.

    16-bit output clips to the representable range first.
    """
    if not channels:
        raise SignalMismatchError("Nothing to write", expected=">= 1 channel")
    rate = channels[0].rate
    length = len(channels[0])
    for channel in channels[1:]:
        if channel.rate != rate:
            raise SignalMismatchError(
                "All WAV channels must share one rate",
                expected=rate,
                actual=channel.rate,
            )
        if len(channel) != length:
            raise SignalMismatchError(
                "All WAV channels must be equally long",
                expected=length,
                actual=len(channel),
            )
    if abs(rate - round(rate)) > 1e-9:
        raise SignalMismatchError(
            "WAV headers store integer rates", expected="integer rate", actual=rate
        )

    data = np.stack([c.samples for c in channels], axis=1)
    if fmt == "pcm16":
        data = np.clip(data, -1.0, _PCM16_MAX)
    else:
        data = data.astype(np.float32)

    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(
        str(path),
        data,
        int(round(rate)),
        subtype=_SUBTYPES[fmt],
        format="WAV",
        endian="LITTLE",
    )
    logger.info(f"Wrote {len(channels)}-channel WAV ({fmt}, {length} frames): {path}")
    return path


def read_wav(path: Path) -> list[SampleBuffer]:
    """Read every channel of a WAV file as float64 buffers starting at t0 = 0."""
    data, rate = sf.read(str(path), dtype="float64", always_2d=True)
    logger.debug(f"Read {data.shape[1]} channel(s) at {rate} Hz from {path}")
    return [SampleBuffer(data[:, i], float(rate), 0.0) for i in range(data.shape[1])]
