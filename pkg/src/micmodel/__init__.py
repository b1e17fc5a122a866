from .adc import (
    decimation_ratio,
    design_lpf,
    effective_cutoff,
    lpf_and_decimate,
    noise_gain,
    quantize_pcm16,
)
from .capture import capture, spectrum_frame
from .nonlinearity import apply_nonlinearity

__all__ = [
    "apply_nonlinearity",
    "capture",
    "decimation_ratio",
    "design_lpf",
    "effective_cutoff",
    "lpf_and_decimate",
    "noise_gain",
    "quantize_pcm16",
    "spectrum_frame",
]
