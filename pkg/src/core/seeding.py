"""
Counter-based seeding.

Every random draw in a run descends from one root seed through
``SeedSequence(root, spawn_key=(trial, tag))``, where the tag is a stable hash
of a stream name. Trials can therefore run in any order or process and still
see the same numbers.
"""

import zlib

import numpy as np

STREAMS = ("noise-primary", "noise-secondary", "clock", "placement", "ids")


def stream_tag(stream: str) -> int:
    """Stable 32-bit tag of a stream name."""
    return zlib.crc32(stream.encode("utf-8"))


class SeedSplitter:
    """Independent child seeds for (trial, stream) pairs."""

    def __init__(self, root_seed: int) -> None:
        if root_seed < 0:
            raise ValueError(f"Root seed must be non-negative, got {root_seed}")
        self.root_seed = int(root_seed)

    def sequence(self, trial: int, stream: str) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            self.root_seed, spawn_key=(int(trial), stream_tag(stream))
        )

    def seed(self, trial: int, stream: str) -> int:
        """A plain integer seed, for models that store one."""
        return int(self.sequence(trial, stream).generate_state(1, dtype=np.uint32)[0])

    def rng(self, trial: int, stream: str) -> np.random.Generator:
        return np.random.default_rng(self.sequence(trial, stream))

    def __repr__(self) -> str:
        return f"SeedSplitter(root_seed={self.root_seed})"
