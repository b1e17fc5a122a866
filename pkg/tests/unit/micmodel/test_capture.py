"""Unit tests for the full microphone capture path."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from scipy.signal import hilbert

from src.core.tables import read_table
from src.micmodel.capture import capture
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import MicNonlinearity
from src.models.signal_params import ChirpParams
from src.signals.waveforms import gen_chirp, gen_cw

RATE = 441_000.0
ADC = 44_100.0


def gated_carrier(
    freq: float, starts: list[float], width: float, span: float
) -> SampleBuffer:
    carrier = gen_cw(freq, 1.0, RATE, span)
    gate = np.zeros(len(carrier))
    for start in starts:
        gate[int(round(start * RATE)) : int(round((start + width) * RATE))] = 1.0
    return carrier.with_samples(carrier.samples * gate)


def demodulated_level(audio: SampleBuffer, freq: float, window: int) -> np.ndarray:
    k = np.arange(len(audio))
    baseband = audio.samples * np.exp(-2j * np.pi * freq * k / audio.rate)
    return 2 * np.abs(np.convolve(baseband, np.ones(window) / window, mode="same"))


class TestCapture:
    @pytest.fixture
    def mic(self) -> MicNonlinearity:
        return MicNonlinearity()

    def test_silence_in_silence_out(self, mic: MicNonlinearity) -> None:
        audio = capture(SampleBuffer.zeros(44_100, RATE), mic)
        assert len(audio) == 4410
        assert not np.any(audio.samples)

    def test_deterministic(self, mic: MicNonlinearity) -> None:
        x = gen_cw(50_000.0, 1.0, RATE, 0.02)
        assert np.array_equal(capture(x, mic).samples, capture(x, mic).samples)

    def test_pulses_and_cw_give_difference_tone_bursts(
        self, mic: MicNonlinearity
    ) -> None:
        starts = [0.05, 0.12]
        cw = gen_cw(50_000.0, 1.0, RATE, 0.2)
        pulses = gated_carrier(40_000.0, starts, 0.01, 0.2)
        acoustic = cw.with_samples(cw.samples + pulses.samples)
        audio = capture(acoustic, mic)
        level = demodulated_level(audio, 10_000.0, window=88)

        expected = mic.g2 * 1.0 * 1.0
        for start in starts:
            centre = int(round((start + 0.005) * ADC))
            assert level[centre] == pytest.approx(expected, rel=0.1)
        for quiet in (0.03, 0.09, 0.16):
            assert level[int(round(quiet * ADC))] < 0.05 * expected

    def test_pulse_and_chirp_give_swept_segment(self, mic: MicNonlinearity) -> None:
        chirp = ChirpParams.from_sweep(45_000.0, 10_000.0, 0.1, RATE)
        pulse = gated_carrier(40_000.0, [0.05], 0.03, 0.2)
        acoustic = pulse.with_samples(
            pulse.samples + gen_chirp(chirp, RATE, 0.2).samples
        )
        audio = capture(acoustic, mic)
        segment = audio.samples[int(0.05 * ADC) : int(0.08 * ADC)]
        segment = segment - segment.mean()

        power = np.abs(np.fft.rfft(segment)) ** 2
        freqs = np.fft.rfftfreq(segment.size, 1 / ADC)
        audible = freqs >= 1_000.0
        in_band = audible & (freqs >= 4_900.0) & (freqs <= 15_100.0)
        assert power[in_band].sum() / power[audible].sum() >= 0.99

        analytic = hilbert(segment)
        inst = np.angle(analytic[1:] * np.conj(analytic[:-1])) * ADC / (2 * np.pi)
        interior = inst[100:-100]
        assert interior.min() >= 5_000.0
        assert interior.max() <= 15_000.0
        slope = np.polyfit(np.arange(interior.size) / ADC, interior, 1)[0]
        assert slope * 0.03 == pytest.approx(3_000.0, abs=34.0)

    # --- options ---

    def test_spectrum_dump(self, tmp_path: Path, mic: MicNonlinearity) -> None:
        path = tmp_path / "spectrum.csv"
        capture(gen_cw(50_000.0, 1.0, RATE, 0.01), mic, spectrum_path=path)
        assert path.read_text().splitlines()[0] == "# schema: spectrum v1"
        name, frame = read_table(path)
        assert name == "spectrum"
        assert list(frame.columns) == ["frequency_hz", "power_db"]
        peak = frame.loc[frame["power_db"].idxmax(), "frequency_hz"]
        assert peak == pytest.approx(50_000.0, abs=100.0)

    def test_quantized_output_on_pcm_grid(self) -> None:
        mic = MicNonlinearity(quantize_16bit=True)
        audio = capture(gen_cw(1_000.0, 0.5, RATE, 0.01), mic)
        steps = audio.samples * 32768
        np.testing.assert_array_equal(steps, np.round(steps))
