"""Per-beacon time of arrival from preamble starts."""

import logging
from collections.abc import Sequence

from src.models.detection import Detection, DetectorConfig, ToaEstimate

logger = logging.getLogger(__name__)


def strongest_per_id(dets: Sequence[Detection]) -> list[Detection]:
    """One detection per decoded id, keeping the highest peak score."""
    best: dict[int, Detection] = {}
    for det in dets:
        if det.id is None:
            continue
        kept = best.get(det.id)
        if kept is None or det.peak_score > kept.peak_score:
            if kept is not None:
                logger.debug(
                    f"Duplicate preamble for id {det.id}: "
                    f"{kept.b_start:.1f} replaced by {det.b_start:.1f}"
                )
            best[det.id] = det
    return sorted(best.values(), key=lambda d: d.b_start)


def estimate_toas(dets: Sequence[Detection], cfg: DetectorConfig) -> list[ToaEstimate]:
    """t_i = ((B_i - B_1) mod slot) / fs with B_1 the earliest kept preamble."""
    kept = strongest_per_id(dets)
    if not kept:
        return []
    slot = cfg.slot_samples
    first = kept[0].b_start
    toas = [
        ToaEstimate(
            anchor_id=det.id,
            toa_s=((det.b_start - first) % slot) / cfg.adc_rate,
            b_start=det.b_start,
            peak_score=det.peak_score,
        )
        for det in kept
        if det.id is not None
    ]
    logger.info(f"{len(toas)} ToA(s) relative to anchor {kept[0].id}")
    return toas
