from .context import ReceiverContext
from .correlation import (
    DynamicChirpCorrelator,
    detect_preambles,
    exhaustive_search,
    find_global_offset,
)
from .decoding import decode_bits, decode_id
from .receiver import BeaconReceiver
from .slope import identify_cbeacon
from .toa import estimate_toas
from .turbocharge import classify_frames, turbocharge

__all__ = [
    "BeaconReceiver",
    "DynamicChirpCorrelator",
    "ReceiverContext",
    "classify_frames",
    "decode_bits",
    "decode_id",
    "detect_preambles",
    "estimate_toas",
    "exhaustive_search",
    "find_global_offset",
    "identify_cbeacon",
    "turbocharge",
]
