"""Unit tests for WAV import/export."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.core.exceptions import SignalMismatchError
from src.models.sample_buffer import SampleBuffer
from src.signals.wav import read_wav, write_wav

RATE = 44_100.0


@pytest.fixture
def tone() -> SampleBuffer:
    t = np.arange(4410) / RATE
    return SampleBuffer(0.5 * np.sin(2 * np.pi * 1000.0 * t), RATE)


class TestWriteWav:
    def test_float_round_trip(self, tmp_path: Path, tone: SampleBuffer) -> None:
        path = write_wav(tmp_path / "tone.wav", [tone])
        (back,) = read_wav(path)
        assert back.rate == RATE
        assert back.t0 == 0.0
        np.testing.assert_allclose(back.samples, tone.samples, atol=1e-7)

    def test_pcm16_round_trip(self, tmp_path: Path, tone: SampleBuffer) -> None:
        path = write_wav(tmp_path / "tone.wav", [tone], fmt="pcm16")
        (back,) = read_wav(path)
        np.testing.assert_allclose(back.samples, tone.samples, atol=1 / 32768)

    def test_pcm16_clips_out_of_range(self, tmp_path: Path) -> None:
        loud = SampleBuffer(np.array([2.0, -2.0, 0.0]), RATE)
        (back,) = read_wav(write_wav(tmp_path / "loud.wav", [loud], fmt="pcm16"))
        assert back.samples[0] == pytest.approx(32767 / 32768)
        assert back.samples[1] == -1.0

    def test_two_channels(self, tmp_path: Path, tone: SampleBuffer) -> None:
        path = write_wav(tmp_path / "dual.wav", [tone, tone.scaled(-1.0)])
        primary, secondary = read_wav(path)
        np.testing.assert_allclose(primary.samples, -secondary.samples)

    def test_creates_parent_directories(
        self, tmp_path: Path, tone: SampleBuffer
    ) -> None:
        path = write_wav(tmp_path / "a" / "b" / "tone.wav", [tone])
        assert path.exists()

    def test_same_input_same_bytes(self, tmp_path: Path, tone: SampleBuffer) -> None:
        a = write_wav(tmp_path / "a.wav", [tone])
        b = write_wav(tmp_path / "b.wav", [tone])
        assert a.read_bytes() == b.read_bytes()

    # --- errors ---

    def test_rejects_no_channels(self, tmp_path: Path) -> None:
        with pytest.raises(SignalMismatchError, match="Nothing to write"):
            write_wav(tmp_path / "x.wav", [])

    def test_rejects_rate_mismatch(self, tmp_path: Path, tone: SampleBuffer) -> None:
        other = SampleBuffer(tone.samples, 48_000.0)
        with pytest.raises(SignalMismatchError, match="share one rate"):
            write_wav(tmp_path / "x.wav", [tone, other])

    def test_rejects_length_mismatch(
        self, tmp_path: Path, tone: SampleBuffer
    ) -> None:
        with pytest.raises(SignalMismatchError, match="equally long"):
            write_wav(tmp_path / "x.wav", [tone, tone.slice(0, 100)])

    def test_rejects_fractional_rate(self, tmp_path: Path) -> None:
        buf = SampleBuffer(np.zeros(10), 44_100.5)
        with pytest.raises(SignalMismatchError, match="integer rates"):
            write_wav(tmp_path / "x.wav", [buf])
