"""Pick the room's cBeacon among candidate sweep slopes."""

import logging
from collections.abc import Sequence

from src.core.exceptions import CBeaconAbsentError, DetectionError
from src.models.detection import DetectorConfig
from src.models.sample_buffer import SampleBuffer

from .correlation import DynamicChirpCorrelator

logger = logging.getLogger(__name__)


def identify_cbeacon(
    audio: SampleBuffer, candidates: Sequence[DetectorConfig]
) -> tuple[int, int, float]:
    """
    Index of the best-matching candidate, its Γ and score.

    Neighboring rooms use different slopes; a mismatched slope leaves a
    residual chirp after dechirping and scores near the noise level.
    """
    if not candidates:
        raise DetectionError("No candidate chirp configurations given")
    best: tuple[int, int, float] | None = None
    best_score = 0.0
    for index, cfg in enumerate(candidates):
        try:
            gamma, score = DynamicChirpCorrelator(audio, cfg).find_global_offset()
        except CBeaconAbsentError as e:
            best_score = max(best_score, e.score)
            logger.debug(f"Candidate {index} ({cfg.delta_f:.4f} Hz/sample) absent")
            continue
        logger.debug(f"Candidate {index} scores {score:.1f} at Γ={gamma}")
        if best is None or score > best[2]:
            best = (index, gamma, score)
    if best is None:
        raise CBeaconAbsentError(best_score, candidates[0].peak_threshold)
    logger.info(f"Room chirp is candidate {best[0]} (score {best[2]:.1f})")
    return best
