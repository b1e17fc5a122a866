from .fm0 import bits_from_half_levels, fm0_decode, fm0_encode, half_bit_levels
from .waveforms import (
    chirp_phase,
    frame_envelope,
    gen_chirp,
    gen_cw,
    gen_ubeacon_frame,
)
from .wav import read_wav, write_wav

__all__ = [
    "bits_from_half_levels",
    "chirp_phase",
    "fm0_decode",
    "fm0_encode",
    "frame_envelope",
    "gen_chirp",
    "gen_cw",
    "gen_ubeacon_frame",
    "half_bit_levels",
    "read_wav",
    "write_wav",
]
