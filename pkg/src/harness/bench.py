"""Wall-clock timing of the synthesis and detection stages."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from typing import Any

from src.core.seeding import SeedSplitter
from src.detector.correlation import DynamicChirpCorrelator
from src.micmodel.capture import capture
from src.models.detection import DetectorConfig
from src.models.scenario import Scenario

from .synthesis import render_acoustic
from .trials import base_scenario, ranging_scenario

logger = logging.getLogger(__name__)

STAGES = ("synthesis", "capture", "global-offset", "detection", "exhaustive")


def default_bench_scenario() -> Scenario:
    """Two anchors 0.4 m and 2 m from the receiver at 20 dB."""
    return ranging_scenario(base_scenario(None), 2.0, snr_db=20.0)


def _timed(fn: Callable[[], Any]) -> tuple[Any, float]:
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def _bench_once(
    scenario: Scenario, cfg: DetectorConfig, exhaustive: bool
) -> dict[str, float]:
    splitter = SeedSplitter(scenario.seed)
    render, seconds = _timed(lambda: render_acoustic(scenario, splitter))
    timings = {"synthesis": seconds}
    audio, timings["capture"] = _timed(lambda: capture(render.primary, scenario.mic))
    (gamma, _), timings["global-offset"] = _timed(
        lambda: DynamicChirpCorrelator(audio, cfg).find_global_offset()
    )
    _, timings["detection"] = _timed(
        lambda: DynamicChirpCorrelator(audio, cfg).detect_preambles(gamma)
    )
    if exhaustive:
        _, timings["exhaustive"] = _timed(
            lambda: DynamicChirpCorrelator(audio, cfg).exhaustive_search()
        )
    return timings


def run_bench(
    scenario: Scenario | None = None, repeat: int = 3, exhaustive: bool = True
) -> list[dict[str, Any]]:
    """
    Time every stage ``repeat`` times on one scenario.

    Detection stages get a fresh correlator per repeat so the analytic signal
    is part of each measurement. The exhaustive oracle dominates the run time
    and can be skipped.
    """
    if repeat < 1:
        raise ValueError(f"repeat must be at least 1, got {repeat}")
    scenario = scenario or default_bench_scenario()
    cfg = DetectorConfig.from_scenario(scenario)
    stages = [s for s in STAGES if exhaustive or s != "exhaustive"]
    rows: list[dict[str, Any]] = []
    for index in range(repeat):
        timings = _bench_once(scenario, cfg, exhaustive)
        rows.extend(
            {"stage": stage, "seconds": timings[stage], "repeat": index}
            for stage in stages
        )
        logger.info(
            f"Bench repeat {index + 1}/{repeat}: "
            + ", ".join(f"{s} {timings[s]:.3f} s" for s in stages)
        )
    return rows
