"""Unit tests for AcousticScene."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from src.channel.scene import AcousticScene, Emission
from src.models.sample_buffer import SampleBuffer
from src.models.scenario import ChannelConfig

RATE = 441_000.0
C = 344.38


class TestAcousticScene:
    @pytest.fixture
    def scene(self) -> AcousticScene:
        click = SampleBuffer(np.array([0.5]), RATE, 0.001)
        return (
            AcousticScene(C)
            .add(Emission("anchor-3", (3.4438, 0.0, 0.0), click, anchor_id=3))
            .add(Emission("cbeacon", (0.0, 0.0, 1.0), click.scaled(2.0)))
        )

    # --- arrivals ---

    def test_arrivals(self, scene: AcousticScene) -> None:
        anchor, cbeacon = scene.arrivals((0.0, 0.0, 0.0))
        assert anchor.anchor_id == 3
        assert anchor.delay_s == pytest.approx(0.01)
        assert anchor.amplitude == pytest.approx(0.5 / 3.4438)
        assert cbeacon.anchor_id is None
        assert cbeacon.distance == pytest.approx(1.0)

    def test_arrival_gain(self, scene: AcousticScene) -> None:
        loud = scene.arrivals((0.0, 0.0, 0.0))[0].amplitude
        quiet = scene.arrivals((0.0, 0.0, 0.0), gain=0.1)[0].amplitude
        assert quiet == pytest.approx(0.1 * loud)

    def test_range_limit_flag(
        self, scene: AcousticScene, caplog: pytest.LogCaptureFixture
    ) -> None:
        with caplog.at_level(logging.WARNING):
            assert scene.range_limited((0.0, 0.0, 0.0), slot_s=0.005) == [3]
        assert "one-slot range" in caplog.text
        assert scene.range_limited((0.0, 0.0, 0.0), slot_s=0.1) == []

    # --- render ---

    def test_render_places_arrivals(self, scene: AcousticScene) -> None:
        heard = scene.render((0.0, 0.0, 0.0), RATE, 0.02)
        assert len(heard) == 8820
        assert heard.t0 == 0.0
        assert heard.samples[441 + 4410] == pytest.approx(0.5 / 3.4438)

    def test_render_gain(self, scene: AcousticScene) -> None:
        full = scene.render((0.0, 0.0, 0.0), RATE, 0.02)
        shadowed = scene.render((0.0, 0.0, 0.0), RATE, 0.02, gain=0.5)
        np.testing.assert_allclose(shadowed.samples, 0.5 * full.samples)

    def test_render_applies_absorption(self) -> None:
        click = SampleBuffer(np.array([1.0]), RATE)
        scene = AcousticScene(C, ChannelConfig(absorption_db_per_m=2.0))
        scene.add(Emission("a", (3.4438, 0, 0), click, anchor_id=1))
        heard = scene.render((0.0, 0.0, 0.0), RATE, 0.02)
        expected = 10 ** (-2.0 * 3.4438 / 20) / 3.4438
        assert heard.samples[4410] == pytest.approx(expected)

    def test_empty_scene_is_silent(self) -> None:
        heard = AcousticScene(C).render((1.0, 1.0, 1.0), RATE, 0.01)
        assert len(heard) == 4410
        assert not np.any(heard.samples)
