"""
Dynamic-chirp correlation on downconverted audio.

A uBeacon pulse mixed with the cBeacon chirp shows up in the audio as a
segment of the periodic downconverted chirp. Correlating against the dynamic
template of one (Γ, τ) pair equals a boxcar sum of the dechirped signal
``x_a * conj(R_Γ)``, so one Γ costs O(N) and the search is split into a
global-offset pass (Γ) followed by a preamble pass (τ).
"""

from __future__ import annotations

import logging
from functools import cached_property

import numpy as np
from scipy.signal import correlate, hilbert

from src.core.exceptions import CBeaconAbsentError, InsufficientDataError
from src.models.detection import Detection, DetectorConfig
from src.models.sample_buffer import SampleBuffer

logger = logging.getLogger(__name__)

_TINY = 1e-300
_FLOOR_FRACTION = 1e-12
# Peaks more than 60 dB below the strongest preamble are not beacons.
_DYNAMIC_RANGE = 1e-3


def chirp_at(u: np.ndarray, cfg: DetectorConfig, offset_hz: float = 0.0) -> np.ndarray:
    """Analytic downconverted chirp at sweep-local (possibly fractional) index u."""
    phase = (cfg.f_diff + offset_hz) * u + 0.5 * cfg.delta_f * u * u
    return np.exp(2j * np.pi * phase / cfg.adc_rate)


def template_period(cfg: DetectorConfig, offset_hz: float = 0.0) -> np.ndarray:
    """One intact period of the analytic downconverted chirp."""
    return chirp_at(np.arange(cfg.period_k, dtype=np.float64), cfg, offset_hz)


def parabolic_offset(left: float, centre: float, right: float) -> float:
    """Vertex of the parabola through three samples, clamped to half a sample."""
    denom = left - 2.0 * centre + right
    if denom == 0.0:
        return 0.0
    return float(np.clip(0.5 * (left - right) / denom, -0.5, 0.5))


def triangle_offset(left: float, centre: float, right: float) -> float:
    """
    Apex of a symmetric triangle through three samples, clamped to half a
    sample. A boxcar sliding over a gated pulse peaks as a triangle.
    """
    drop = centre - min(left, right)
    if drop <= 0.0:
        return 0.0
    return float(np.clip(0.5 * (right - left) / drop, -0.5, 0.5))


def boxcar_sum(z: np.ndarray, length: int) -> np.ndarray:
    """``out[t] = z[t:t+length].sum()`` for every full window."""
    csum = np.concatenate([[0.0], np.cumsum(z)])
    return csum[length:] - csum[:-length]


class DynamicChirpCorrelator:
    """
    Correlation state for one audio buffer.

    The analytic signal and the per-Γ dechirped product are computed once and
    shared by preamble detection and id decoding.
    """

    def __init__(self, audio: SampleBuffer, cfg: DetectorConfig) -> None:
        self._logger = logger.getChild(self.__class__.__name__)
        self.audio = audio
        self.cfg = cfg
        self._dechirped: dict[tuple[int, float, float], np.ndarray] = {}
        self._fractions: dict[int, float] = {}

    @cached_property
    def analytic(self) -> np.ndarray:
        samples = self.audio.samples
        if samples.size == 0:
            return np.zeros(0, dtype=np.complex128)
        return np.asarray(hilbert(samples - samples.mean()))

    def fraction(self, gamma: int) -> float:
        """Sub-sample part of Γ found by :meth:`find_global_offset`, else 0."""
        return self._fractions.get(int(gamma), 0.0)

    def reference(
        self, gamma: int, offset_hz: float = 0.0, fraction: float | None = None
    ) -> np.ndarray:
        """R_Γ over the whole buffer: the template restarted at every Γ + jK."""
        k = self.cfg.period_k
        frac = self.fraction(gamma) if fraction is None else fraction
        if frac == 0.0:
            idx = (np.arange(len(self.audio)) - gamma) % k
            return template_period(self.cfg, offset_hz)[idx]
        u = (np.arange(len(self.audio), dtype=np.float64) - gamma - frac) % k
        return chirp_at(u, self.cfg, offset_hz)

    def dechirp(self, gamma: int, offset_hz: float = 0.0) -> np.ndarray:
        frac = self.fraction(gamma)
        key = (int(gamma), float(offset_hz), frac)
        if key not in self._dechirped:
            self._dechirped[key] = self.analytic * np.conj(
                self.reference(gamma, offset_hz, frac)
            )
        return self._dechirped[key]

    # --- global offset ---

    def global_offset_profile(self) -> np.ndarray:
        """
        Correlation energy with one intact period, summed per lag modulo K.

        Full-mode lags run from ``-(K-1)``, so the windows of every residue
        tile the whole buffer and each residue sees every sample exactly once.
        """
        k = self.cfg.period_k
        n = len(self.audio)
        if n < 2 * k:
            raise InsufficientDataError(
                "Global offset search needs two chirp periods of audio",
                needed=2 * k,
                available=n,
            )
        r = correlate(
            self.analytic, template_period(self.cfg), mode="full", method="fft"
        )
        lags = np.arange(r.size) - (k - 1)
        return np.bincount(lags % k, weights=np.abs(r) ** 2, minlength=k)

    def find_global_offset(self) -> tuple[int, float]:
        """
        Γ in [0, K) and its peak-to-median score.

        The sub-sample remainder from a parabola through the profile peak is
        kept and applied by every later reference built for this Γ.
        """
        profile = self.global_offset_profile()
        k = self.cfg.period_k
        gamma = int(np.argmax(profile))
        peak = float(profile[gamma])
        median = float(np.median(profile))
        if peak <= _TINY:
            raise CBeaconAbsentError(0.0, self.cfg.peak_threshold)
        score = float(np.sqrt(peak / max(median, peak * _FLOOR_FRACTION**2)))
        if score < self.cfg.peak_threshold:
            raise CBeaconAbsentError(score, self.cfg.peak_threshold)
        frac = parabolic_offset(
            float(profile[(gamma - 1) % k]), peak, float(profile[(gamma + 1) % k])
        )
        self._fractions[gamma] = frac
        self._logger.info(
            f"Global chirp offset Γ={gamma}{frac:+.3f} (score {score:.1f})"
        )
        return gamma, score

    # --- preambles ---

    def preamble_correlation(self, gamma: int, offset_hz: float = 0.0) -> np.ndarray:
        """|c(τ)| for every τ whose preamble window fits the buffer."""
        length = self.cfg.preamble_samples
        if len(self.audio) < length:
            return np.zeros(0)
        return np.abs(boxcar_sum(self.dechirp(gamma, offset_hz), length))

    def noise_floor(self, gamma: int) -> float:
        """
        Median correlation against a frequency-offset reference.

        The offset reference decorrelates every downconverted chirp while
        leaving white noise statistics unchanged.
        """
        off = self.preamble_correlation(gamma, self.cfg.floor_offset_hz)
        if off.size == 0:
            return _TINY
        return float(np.median(off))

    def detect_preambles(self, gamma: int) -> list[Detection]:
        cfg = self.cfg
        length = cfg.preamble_samples
        mag = self.preamble_correlation(gamma)
        if mag.size < 3:
            return []
        floor = max(
            self.noise_floor(gamma), float(mag.max()) * _DYNAMIC_RANGE, _TINY
        )
        ratio = mag / floor

        inner = mag[1:-1]
        is_peak = (inner >= mag[:-2]) & (inner > mag[2:])
        strong = ratio[1:-1] >= cfg.peak_threshold
        candidates = np.flatnonzero(is_peak & strong) + 1
        order = candidates[np.argsort(mag[candidates])[::-1]]

        energy = boxcar_sum(np.abs(self.analytic) ** 2, length)
        suppress_after = length + int(np.ceil(cfg.id_field_samples))
        taken: list[int] = []
        detections: list[Detection] = []
        for tau in order:
            if any(t - length < tau < t + suppress_after for t in taken):
                continue
            taken.append(int(tau))
            offset = triangle_offset(mag[tau - 1], mag[tau], mag[tau + 1])
            coherence = mag[tau] / np.sqrt(length * max(energy[tau], _TINY))
            detections.append(
                Detection(
                    b_start=float(tau + offset),
                    gamma=gamma,
                    period_k=cfg.period_k,
                    tau=int(tau),
                    peak_score=float(ratio[tau]),
                    coherence=float(min(coherence, 1.0)),
                )
            )
            self._logger.debug(
                f"Preamble at τ={tau}{offset:+.3f} (ratio {ratio[tau]:.1f})"
            )
        detections.sort(key=lambda d: d.b_start)
        self._logger.info(f"Found {len(detections)} preamble(s) with Γ={gamma}")
        return detections

    def exhaustive_search(self) -> tuple[int, int, float]:
        """Brute-force (Γ, τ) argmax of |c| over every Γ in [0, K)."""
        best = (0, 0, -1.0)
        for gamma in range(self.cfg.period_k):
            mag = np.abs(
                boxcar_sum(
                    self.analytic * np.conj(self.reference(gamma, fraction=0.0)),
                    self.cfg.preamble_samples,
                )
            )
            tau = int(np.argmax(mag))
            if mag[tau] > best[2]:
                best = (gamma, tau, float(mag[tau]))
        return best

    # --- id field ---

    def soft_envelope(self, det: Detection) -> tuple[np.ndarray, int]:
        """
        Real on/off envelope from the preamble start to the end of the id
        field, normalized to the preamble level, plus its start index.
        """
        cfg = self.cfg
        start = int(round(det.b_start))
        half = int(np.ceil(cfg.bit_samples / 2.0))
        stop = start + cfg.preamble_samples + int(np.ceil(cfg.id_field_samples)) + half
        if start < 0 or stop > len(self.audio):
            raise InsufficientDataError(
                "Id field runs past the end of the audio",
                needed=stop,
                available=len(self.audio),
            )
        z = self.dechirp(det.gamma)[start:stop]
        ref = z[: cfg.preamble_samples].mean()
        level = abs(ref)
        if level <= _TINY:
            return np.zeros(z.size), start
        return np.real(z * np.conj(ref)) / (level * level), start


def find_global_offset(audio: SampleBuffer, cfg: DetectorConfig) -> int:
    gamma, _ = DynamicChirpCorrelator(audio, cfg).find_global_offset()
    return gamma


def detect_preambles(
    audio: SampleBuffer, gamma: int, cfg: DetectorConfig
) -> list[Detection]:
    return DynamicChirpCorrelator(audio, cfg).detect_preambles(gamma)


def exhaustive_search(audio: SampleBuffer, cfg: DetectorConfig) -> tuple[int, int]:
    gamma, tau, _ = DynamicChirpCorrelator(audio, cfg).exhaustive_search()
    return gamma, tau
