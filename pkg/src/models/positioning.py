from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np
from pydantic import Field, model_validator

from src.core.exceptions import ConfigurationError

from .base import Position, SimBase
from .detection import ToaEstimate


@dataclass(frozen=True, eq=False)
class PseudoRangeSet:
    """
    Anchor positions with their measured ToAs.

    ``c * toas[i]`` equals the anchor distance plus a clock term common to all
    entries, so ``t_s`` may stay 0 and be absorbed by the solver.
    """

    anchors: np.ndarray
    toas: np.ndarray
    c: float
    t_s: float = 0.0
    ids: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        anchors = np.asarray(self.anchors, dtype=np.float64).reshape(-1, 3)
        toas = np.asarray(self.toas, dtype=np.float64).reshape(-1)
        if anchors.shape[0] != toas.size:
            raise ConfigurationError(
                "Each anchor needs exactly one ToA",
                field_name="toas",
                expected=anchors.shape[0],
                actual=toas.size,
            )
        if not self.c > 0:
            raise ConfigurationError(
                "Speed of sound must be positive", field_name="c", actual=self.c
            )
        if not (np.all(np.isfinite(anchors)) and np.all(np.isfinite(toas))):
            raise ConfigurationError("Anchor positions and ToAs must be finite")
        ids = self.ids or tuple(range(toas.size))
        if len(ids) != toas.size:
            raise ConfigurationError(
                "ids must match the number of entries",
                field_name="ids",
                expected=toas.size,
                actual=len(ids),
            )
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "toas", toas)
        object.__setattr__(self, "ids", tuple(int(i) for i in ids))

    def __len__(self) -> int:
        return int(self.toas.size)

    @property
    def pseudo_ranges(self) -> np.ndarray:
        return self.c * (self.toas - self.t_s)

    def subset(self, keep: np.ndarray | Iterable[bool]) -> PseudoRangeSet:
        mask = np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep)
        return PseudoRangeSet(
            self.anchors[mask],
            self.toas[mask],
            self.c,
            self.t_s,
            tuple(i for i, k in zip(self.ids, mask, strict=True) if k),
        )

    @classmethod
    def from_toas(
        cls,
        toas: Iterable[ToaEstimate],
        anchor_positions: Mapping[int, Position],
        c: float,
        slot_s: float | None = None,
    ) -> PseudoRangeSet:
        """
        Pair ToAs with surveyed anchors, skipping ids the map does not know.

        With ``slot_s`` given, ToAs above half a slot are moved to the negative
        side: an anchor closer than the reference beacon otherwise wraps to
        almost a full slot.
        """
        rows, values, ids = [], [], []
        for toa in toas:
            if toa.anchor_id not in anchor_positions:
                continue
            t = toa.toa_s
            if slot_s is not None and t >= slot_s / 2:
                t -= slot_s
            rows.append(anchor_positions[toa.anchor_id])
            values.append(t)
            ids.append(toa.anchor_id)
        return cls(
            np.asarray(rows, dtype=np.float64).reshape(-1, 3),
            np.asarray(values, dtype=np.float64),
            c,
            0.0,
            tuple(ids),
        )


class PositionFix(SimBase):
    position: Position = Field(..., description="Solved receiver position P (m).")
    clock_term: float = Field(..., description="beta = c*(t_b + t_s) (m).")
    residual_rms: float = Field(..., description="RMS pseudo-range residual (m).")
    iterations: int = Field(..., ge=0)
    converged: bool
    dims: int = Field(default=3)
    used_ids: tuple[int, ...] = Field(default=())
    rejected_ids: tuple[int, ...] = Field(default=())

    @model_validator(mode="after")
    def _finite_when_converged(self) -> PositionFix:
        if self.converged and not np.isfinite(self.residual_rms):
            raise ValueError("A converged fix must have a finite residual")
        return self

    def error_to(self, truth: Position) -> float:
        """Euclidean error over the solved dimensions."""
        delta = np.subtract(self.position, truth)[: self.dims]
        return float(np.linalg.norm(delta))


class Schedule(SimBase):
    """Slot index per anchor; slots repeat every round."""

    slot_ms: float = Field(..., gt=0)
    slots: dict[int, int] = Field(..., description="Anchor id -> slot index.")
    n_slots: int = Field(..., ge=0)

    @property
    def round_ms(self) -> float:
        return self.n_slots * self.slot_ms

    @property
    def round_s(self) -> float:
        return self.round_ms / 1000.0

    def nominal_epoch(self, anchor_id: int, round_index: int = 0) -> float:
        """Nominal transmit time of an anchor in a given round (s)."""
        slot = self.slots[anchor_id]
        return round_index * self.round_s + slot * self.slot_ms / 1000.0
