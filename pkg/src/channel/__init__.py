from .propagation import (
    add_noise,
    add_white_noise,
    align_to,
    delay_buffer,
    fractional_delay_taps,
    mix,
    noise_std_for,
    path_gain,
    propagate,
)
from .scene import AcousticScene, Arrival, Emission

__all__ = [
    "AcousticScene",
    "Arrival",
    "Emission",
    "add_noise",
    "add_white_noise",
    "align_to",
    "delay_buffer",
    "fractional_delay_taps",
    "mix",
    "noise_std_for",
    "path_gain",
    "propagate",
]
