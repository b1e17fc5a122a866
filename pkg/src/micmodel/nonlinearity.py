"""Polynomial microphone amplifier."""

import numpy as np

from src.models.sample_buffer import SampleBuffer
from src.models.scenario import MicNonlinearity


def apply_nonlinearity(x: SampleBuffer, m: MicNonlinearity) -> SampleBuffer:
    """
    y = g1*x + g2*x**2 + g3*x**3, evaluated pointwise on the full band.

    The quadratic term mixes any two ultrasonic tones down to their
    difference frequency with amplitude g2*A1*A2.
    """
    s = x.samples
    y = m.g1 * s
    if m.g2:
        y = y + m.g2 * s * s
    if m.g3:
        y = y + m.g3 * s * s * s
    return x.with_samples(np.asarray(y))
