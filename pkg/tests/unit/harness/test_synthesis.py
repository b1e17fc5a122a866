"""Unit tests for scenario synthesis."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pytest

from src.core.seeding import SeedSplitter
from src.harness.synthesis import (
    CAPTURE_MARGIN_S,
    SCHEDULE_START_S,
    capture_duration,
    render_acoustic,
    synthesize,
    write_recording,
)
from src.harness.trials import ranging_scenario
from src.models.scenario import AnchorConfig, CBeaconConfig, ReceiverConfig, Scenario
from src.signals.wav import read_wav


def _scenario(**kwargs) -> Scenario:
    values = {
        "name": "one-anchor",
        "cbeacon": CBeaconConfig(position=(0.0, 0.5, 1.5)),
        "receiver": ReceiverConfig(primary=(0.0, 0.0, 1.0)),
        "anchors": [AnchorConfig(id=5, position=(1.5, 0.0, 1.0))],
    }
    values.update(kwargs)
    return Scenario(**values)


class TestSynthesize:
    @pytest.fixture
    def scenario(self) -> Scenario:
        return _scenario()

    def test_two_channels_at_adc_rate(self, scenario: Scenario) -> None:
        recording = synthesize(scenario)
        expected = (SCHEDULE_START_S + 0.1 + CAPTURE_MARGIN_S) * 44_100
        assert len(recording.channels) == 2
        for channel in recording.channels:
            assert channel.rate == 44_100.0
            assert abs(len(channel) - expected) <= 1
        assert recording.noise_std == 0.0
        assert recording.range_limited == []

    def test_arrivals_follow_geometry(self, scenario: Scenario) -> None:
        recording = synthesize(scenario)
        assert recording.arrivals(5) == pytest.approx(
            [SCHEDULE_START_S + 1.5 / scenario.speed_of_sound]
        )
        assert recording.schedule.n_slots == 1

    def test_downconverted_band_dominates(self, scenario: Scenario) -> None:
        audio = synthesize(scenario).primary.samples
        spectrum = np.abs(np.fft.rfft(audio)) ** 2
        freqs = np.fft.rfftfreq(audio.size, 1 / 44_100)
        in_band = spectrum[(freqs >= 5_000) & (freqs <= 15_000)].sum()
        assert in_band > 0.5 * spectrum[freqs > 100].sum()

    def test_noise_is_reproducible(self, scenario: Scenario) -> None:
        noisy = scenario.model_copy(update={"snr_db": 10.0})
        first = synthesize(noisy, SeedSplitter(3), trial=1)
        again = synthesize(noisy, SeedSplitter(3), trial=1)
        other = synthesize(noisy, SeedSplitter(3), trial=2)
        assert first.noise_std > 0
        assert np.array_equal(first.primary.samples, again.primary.samples)
        assert not np.array_equal(first.primary.samples, other.primary.samples)

    def test_no_reference_leaves_audio_clean(
        self, caplog: pytest.LogCaptureFixture
    ) -> None:
        caplog.set_level(logging.WARNING)
        recording = synthesize(_scenario(cbeacon=None, snr_db=10.0))
        assert recording.noise_std == 0.0
        assert "noise-free" in caplog.text

    def test_true_toa_folds_into_slot(self) -> None:
        scenario = ranging_scenario(
            Scenario(receiver=ReceiverConfig(primary=(0.0, 0.0, 1.0))),
            2.0,
            snr_db=None,
        )
        recording = synthesize(scenario)
        assert recording.true_toa(2, 1) == pytest.approx(
            1.6 / scenario.speed_of_sound
        )
        assert recording.true_toa(1, 2) == pytest.approx(
            -1.6 / scenario.speed_of_sound
        )

    def test_write_recording(self, scenario: Scenario, tmp_path: Path) -> None:
        recording = synthesize(scenario)
        path = write_recording(recording, tmp_path / "rec.wav")
        channels = read_wav(path)
        assert len(channels) == 2
        assert np.allclose(channels[0].samples, recording.primary.samples, atol=1e-6)


class TestRenderAcoustic:
    def test_primary_shadow_scales_primary(self) -> None:
        clear = render_acoustic(_scenario())
        shadowed = render_acoustic(
            _scenario(
                receiver=ReceiverConfig(
                    primary=(0.0, 0.0, 1.0), primary_shadow_db=20.0
                )
            )
        )
        assert np.allclose(shadowed.primary.samples, 0.1 * clear.primary.samples)
        assert np.array_equal(shadowed.secondary.samples, clear.secondary.samples)
        assert shadowed.reference_power == pytest.approx(
            1e-4 * clear.reference_power
        )

    def test_far_anchor_flagged(self, caplog: pytest.LogCaptureFixture) -> None:
        caplog.set_level(logging.WARNING)
        render = render_acoustic(
            _scenario(anchors=[AnchorConfig(id=9, position=(40.0, 0.0, 1.0))])
        )
        assert render.range_limited == [9]
        assert "one-slot range" in caplog.text

    def test_explicit_duration(self) -> None:
        scenario = _scenario(duration_s=0.5)
        render = render_acoustic(scenario)
        assert capture_duration(scenario, render.schedule) == 0.5
        assert len(render.primary) == round(0.5 * scenario.internal_rate)
