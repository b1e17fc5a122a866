"""Slot schedule: which anchor transmits when within a round."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Sequence
from typing import TYPE_CHECKING

from src.core.exceptions import ScheduleError
from src.models.positioning import Schedule

if TYPE_CHECKING:
    from src.models.scenario import Scenario

logger = logging.getLogger(__name__)


def build_schedule(
    anchor_ids: Sequence[int],
    slot_ms: float,
    concurrency_groups: Sequence[Sequence[int]] | None = None,
) -> Schedule:
    """
    Give anchors slots in the order listed.

    Members of a concurrency group share the slot of whichever member comes
    first in ``anchor_ids``; the round is as long as the number of slots used.
    """
    ids = [int(i) for i in anchor_ids]
    duplicates = sorted(i for i, n in Counter(ids).items() if n > 1)
    if duplicates:
        raise ScheduleError(
            f"Anchor ids must be distinct, repeated: {duplicates}",
            field_name="anchors",
            expected="distinct ids",
            actual=duplicates,
        )

    group_of: dict[int, int] = {}
    known = set(ids)
    for index, group in enumerate(concurrency_groups or []):
        for member in group:
            if member not in known:
                raise ScheduleError(
                    f"Concurrency group {index} names unknown anchor {member}",
                    field_name="schedule.groups",
                    actual=list(group),
                )
            if member in group_of:
                raise ScheduleError(
                    f"Anchor {member} appears in more than one concurrency group",
                    field_name="schedule.groups",
                    actual=list(group),
                )
            group_of[member] = index

    slots: dict[int, int] = {}
    group_slot: dict[int, int] = {}
    n_slots = 0
    for anchor in ids:
        group = group_of.get(anchor)
        if group is not None and group in group_slot:
            slots[anchor] = group_slot[group]
            continue
        slots[anchor] = n_slots
        if group is not None:
            group_slot[group] = n_slots
        n_slots += 1

    schedule = Schedule(slot_ms=slot_ms, slots=slots, n_slots=n_slots)
    logger.info(
        f"Schedule: {len(ids)} anchor(s) in {n_slots} slot(s), "
        f"round {schedule.round_ms:.0f} ms"
    )
    return schedule


def schedule_for(scenario: Scenario) -> Schedule:
    return build_schedule(
        [a.id for a in scenario.anchors],
        scenario.schedule.slot_ms,
        scenario.schedule.groups,
    )
