"""Unit tests for the dual-microphone Wiener enhancement."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from src.core.exceptions import InsufficientDataError, SignalMismatchError
from src.detector.turbocharge import classify_frames, psd_gap_db, turbocharge
from src.models.detection import DetectorConfig
from src.models.sample_buffer import SampleBuffer

from .synthetic import FakeFrame, downconverted_audio

N = 3 * 4410
NOISE = 0.01


@pytest.fixture
def cfg() -> DetectorConfig:
    return DetectorConfig()


def _noise(seed: int, n: int = N) -> SampleBuffer:
    return SampleBuffer(np.random.default_rng(seed).normal(0.0, NOISE, n), 44_100.0)


def _pair(cfg: DetectorConfig) -> tuple[SampleBuffer, SampleBuffer]:
    """Weak beacon at the primary, ten times stronger at the secondary."""
    beacon = downconverted_audio(cfg, [FakeFrame(5000, 12)], 0, N).samples
    primary = _noise(1).samples + 0.01 * beacon
    secondary = _noise(2).samples + 0.1 * beacon
    return SampleBuffer(primary, 44_100.0), SampleBuffer(secondary, 44_100.0)


class TestClassifyFrames:
    def test_beacon_frames_open_the_gate(self, cfg: DetectorConfig) -> None:
        primary, secondary = _pair(cfg)
        noise = classify_frames(primary, secondary, cfg)
        # Frame j is centred on sample 512 j.
        assert noise[2]
        assert not noise[11]
        assert noise[-2]

    def test_identical_channels_are_all_noise(self, cfg: DetectorConfig) -> None:
        primary, _ = _pair(cfg)
        assert classify_frames(primary, primary, cfg).all()

    def test_gap_is_zero_for_identical_channels(self, cfg: DetectorConfig) -> None:
        x = _noise(3)
        np.testing.assert_allclose(psd_gap_db(x, x, cfg), 0.0, atol=1e-9)


class TestTurbocharge:
    def test_keeps_length_and_timing(self, cfg: DetectorConfig) -> None:
        primary, secondary = _pair(cfg)
        out = turbocharge(primary, secondary, cfg)
        assert len(out) == len(secondary)
        assert out.rate == secondary.rate
        assert out.t0 == secondary.t0

    def test_noise_only_never_amplifies(self, cfg: DetectorConfig) -> None:
        primary, secondary = _noise(4), _noise(5)
        out = turbocharge(primary, secondary, cfg)
        assert out.power() <= secondary.power()

    def test_suppresses_noise_more_than_beacon(self, cfg: DetectorConfig) -> None:
        primary, secondary = _pair(cfg)
        out = turbocharge(primary, secondary, cfg)
        quiet = slice(500, 4000)
        beacon = slice(5100, 6200)
        quiet_gain = out.samples[quiet].std() / secondary.samples[quiet].std()
        beacon_gain = out.samples[beacon].std() / secondary.samples[beacon].std()
        assert quiet_gain < 0.7
        assert beacon_gain > 0.8

    def test_warns_without_noise_frames(
        self, cfg: DetectorConfig, caplog: pytest.LogCaptureFixture
    ) -> None:
        primary = _noise(6)
        secondary = primary.scaled(100.0)
        with caplog.at_level(logging.WARNING):
            turbocharge(primary, secondary, cfg)
        assert "No noise-only frame" in caplog.text

    # --- errors ---

    def test_rate_mismatch(self, cfg: DetectorConfig) -> None:
        other = SampleBuffer(_noise(1).samples, 48_000.0)
        with pytest.raises(SignalMismatchError, match="one rate"):
            turbocharge(_noise(2), other, cfg)

    def test_length_mismatch(self, cfg: DetectorConfig) -> None:
        with pytest.raises(SignalMismatchError, match="equally long"):
            turbocharge(_noise(1), _noise(2, N - 1), cfg)

    def test_shorter_than_a_frame(self, cfg: DetectorConfig) -> None:
        with pytest.raises(InsufficientDataError, match="STFT frame"):
            turbocharge(_noise(1, 512), _noise(2, 512), cfg)
