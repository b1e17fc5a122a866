"""Unit tests for global-offset search and preamble detection."""

from __future__ import annotations

import numpy as np
import pytest

from src.core.exceptions import CBeaconAbsentError, InsufficientDataError
from src.detector.correlation import (
    DynamicChirpCorrelator,
    boxcar_sum,
    detect_preambles,
    exhaustive_search,
    find_global_offset,
    parabolic_offset,
    template_period,
    triangle_offset,
)
from src.models.detection import DetectorConfig
from src.models.sample_buffer import SampleBuffer

from .synthetic import FakeFrame, downconverted_audio

SLOT = 4410


@pytest.fixture
def cfg() -> DetectorConfig:
    return DetectorConfig()


class TestHelpers:
    def test_template_sweeps_downconverted_band(self, cfg: DetectorConfig) -> None:
        t = template_period(cfg)
        inst = np.angle(t[1:] * np.conj(t[:-1])) * cfg.adc_rate / (2 * np.pi)
        assert inst[0] == pytest.approx(5_000.0 + cfg.delta_f / 2, rel=1e-6)
        assert inst[-1] == pytest.approx(15_000.0, abs=5.0)

    def test_boxcar_sum(self) -> None:
        out = boxcar_sum(np.arange(6, dtype=float), 3)
        np.testing.assert_allclose(out, [3, 6, 9, 12])

    def test_parabolic_offset(self) -> None:
        assert parabolic_offset(1.0, 2.0, 1.0) == 0.0
        assert parabolic_offset(1.0, 2.0, 1.5) == pytest.approx(1 / 6)
        assert parabolic_offset(0.0, 1.0, 1.0) == 0.5
        assert parabolic_offset(1.0, 1.0, 1.0) == 0.0

    def test_triangle_offset(self) -> None:
        assert triangle_offset(8.7, 9.7, 9.3) == pytest.approx(0.3)
        assert triangle_offset(9.3, 9.7, 8.7) == pytest.approx(-0.3)
        assert triangle_offset(1.0, 2.0, 1.0) == 0.0
        assert triangle_offset(0.0, 1.0, 5.0) == 0.5
        assert triangle_offset(1.0, 1.0, 1.0) == 0.0


class TestFindGlobalOffset:
    @pytest.mark.parametrize("gamma", [0, 1234, 4407, 4408, 4409])
    def test_recovers_known_offset(self, cfg: DetectorConfig, gamma: int) -> None:
        frames = [FakeFrame(1000, 5), FakeFrame(1000 + SLOT, 9, amplitude=0.6)]
        audio = downconverted_audio(cfg, frames, gamma, 3 * SLOT)
        found = find_global_offset(audio, cfg)
        assert min(abs(found - gamma), cfg.period_k - abs(found - gamma)) <= 1

    def test_recovers_offset_in_noise(self, cfg: DetectorConfig) -> None:
        frames = [FakeFrame(800, 1), FakeFrame(800 + SLOT, 2)]
        audio = downconverted_audio(cfg, frames, 2000, 3 * SLOT, noise_std=0.5)
        assert abs(find_global_offset(audio, cfg) - 2000) <= 1

    def test_pure_noise_is_absent(self, cfg: DetectorConfig) -> None:
        rng = np.random.default_rng(4)
        audio = SampleBuffer(rng.normal(size=3 * SLOT), cfg.adc_rate)
        with pytest.raises(CBeaconAbsentError, match="No downconverted chirp"):
            find_global_offset(audio, cfg)

    def test_silence_is_absent(self, cfg: DetectorConfig) -> None:
        with pytest.raises(CBeaconAbsentError):
            find_global_offset(SampleBuffer.zeros(3 * SLOT, cfg.adc_rate), cfg)

    def test_needs_two_periods(self, cfg: DetectorConfig) -> None:
        audio = SampleBuffer.zeros(2 * SLOT - 1, cfg.adc_rate)
        with pytest.raises(InsufficientDataError, match="two chirp periods"):
            find_global_offset(audio, cfg)


class TestDetectPreambles:
    def test_single_frame(self, cfg: DetectorConfig) -> None:
        audio = downconverted_audio(cfg, [FakeFrame(2500, 17)], 300, 3 * SLOT)
        (det,) = detect_preambles(audio, 300, cfg)
        assert abs(det.b_start - 2500) <= 1
        assert det.gamma == 300
        assert det.peak_score >= cfg.peak_threshold
        assert 0.9 <= det.coherence <= 1.0

    def test_frames_one_slot_apart(self, cfg: DetectorConfig) -> None:
        frames = [FakeFrame(1200, 3), FakeFrame(1200 + SLOT, 3, amplitude=0.4)]
        audio = downconverted_audio(cfg, frames, 0, 3 * SLOT)
        first, second = detect_preambles(audio, 0, cfg)
        assert second.b_start - first.b_start == pytest.approx(SLOT, abs=1)

    def test_sorted_by_start(self, cfg: DetectorConfig) -> None:
        frames = [
            FakeFrame(6000, 1, amplitude=0.3),
            FakeFrame(1500, 2, amplitude=1.0),
            FakeFrame(9500, 4, amplitude=0.6),
        ]
        audio = downconverted_audio(cfg, frames, 42, 4 * SLOT)
        starts = [d.b_start for d in detect_preambles(audio, 42, cfg)]
        assert starts == sorted(starts)
        assert len(starts) == 3

    def test_detects_in_noise(self, cfg: DetectorConfig) -> None:
        audio = downconverted_audio(
            cfg, [FakeFrame(3000, 77)], 100, 3 * SLOT, noise_std=0.3, seed=3
        )
        (det,) = detect_preambles(audio, 100, cfg)
        assert abs(det.b_start - 3000) <= 2

    def test_noise_only_gives_nothing(self, cfg: DetectorConfig) -> None:
        rng = np.random.default_rng(8)
        audio = SampleBuffer(rng.normal(size=3 * SLOT), cfg.adc_rate)
        assert detect_preambles(audio, 0, cfg) == []

    def test_wrong_offset_misses(self, cfg: DetectorConfig) -> None:
        audio = downconverted_audio(
            cfg, [FakeFrame(3000, 77)], 100, 3 * SLOT, noise_std=0.3, seed=3
        )
        assert detect_preambles(audio, 1100, cfg) == []

    def test_scale_free(self, cfg: DetectorConfig) -> None:
        audio = downconverted_audio(cfg, [FakeFrame(2000, 5)], 0, 3 * SLOT)
        (a,) = detect_preambles(audio, 0, cfg)
        (b,) = detect_preambles(audio.scaled(1e-3), 0, cfg)
        assert a.b_start == pytest.approx(b.b_start)

    def test_correlator_caches_dechirp(self, cfg: DetectorConfig) -> None:
        audio = downconverted_audio(cfg, [FakeFrame(2000, 5)], 0, 3 * SLOT)
        correlator = DynamicChirpCorrelator(audio, cfg)
        assert correlator.dechirp(7) is correlator.dechirp(7)


class TestFractionalOffset:
    GAMMA = 1234.4

    @pytest.fixture
    def correlator(self, cfg: DetectorConfig) -> DynamicChirpCorrelator:
        frames = [FakeFrame(1000, 5), FakeFrame(1000 + SLOT, 9, amplitude=0.6)]
        audio = downconverted_audio(cfg, frames, self.GAMMA, 3 * SLOT)
        return DynamicChirpCorrelator(audio, cfg)

    def test_recovers_sub_sample_part(
        self, correlator: DynamicChirpCorrelator
    ) -> None:
        gamma, _ = correlator.find_global_offset()
        assert gamma == 1234
        assert correlator.fraction(gamma) == pytest.approx(0.4, abs=0.1)
        assert correlator.fraction(gamma + 1) == 0.0

    def test_no_phase_jump_at_wrap(self, correlator: DynamicChirpCorrelator) -> None:
        gamma, _ = correlator.find_global_offset()

        def jump(z: np.ndarray) -> float:
            before = z[1100:1220].mean()
            after = z[1250:1370].mean()
            return abs(float(np.angle(after * np.conj(before))))

        whole = correlator.analytic * np.conj(correlator.reference(gamma, fraction=0))
        assert jump(whole) > 0.4
        assert jump(correlator.dechirp(gamma)) < 0.2

    def test_start_stays_on_the_sample(
        self, correlator: DynamicChirpCorrelator
    ) -> None:
        gamma, _ = correlator.find_global_offset()
        first, second = correlator.detect_preambles(gamma)
        assert first.b_start == pytest.approx(1000, abs=0.25)
        assert second.b_start == pytest.approx(1000 + SLOT, abs=0.25)


# Seeded offsets plus the band just below K, where lags wrap.
ORACLE_GAMMAS = [
    *np.random.default_rng(2024).integers(0, 4400, 16).tolist(),
    4406,
    4407,
    4408,
    4409,
]


@pytest.mark.slow
class TestExhaustiveOracle:
    @pytest.mark.parametrize("gamma", ORACLE_GAMMAS)
    def test_optimized_search_matches_exhaustive(
        self, cfg: DetectorConfig, gamma: int
    ) -> None:
        rng = np.random.default_rng(gamma)
        start = int(rng.integers(100, SLOT - 100))
        frames = [
            FakeFrame(start, int(rng.integers(0, 128))),
            FakeFrame(start + SLOT, int(rng.integers(0, 128)), amplitude=0.5),
        ]
        # 0.5 s of audio
        audio = downconverted_audio(cfg, frames, gamma, 5 * SLOT)
        correlator = DynamicChirpCorrelator(audio, cfg)
        found, _ = correlator.find_global_offset()
        tau = int(np.argmax(correlator.preamble_correlation(found)))
        assert exhaustive_search(audio, cfg) == (found, tau) == (gamma, start)
