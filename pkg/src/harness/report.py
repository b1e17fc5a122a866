"""Experiment report files: trials.csv, aggregates.csv and report.yaml."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from src.core.tables import write_table
from src.models.base import Position
from src.models.report import ExperimentReport, TrialRecord

from .config import dump_yaml

logger = logging.getLogger(__name__)

TRIALS_FILE = "trials.csv"
AGGREGATES_FILE = "aggregates.csv"
REPORT_FILE = "report.yaml"


def _xyz(prefix: str, position: Position | None) -> dict[str, float | None]:
    x, y, z = position if position is not None else (None, None, None)
    return {f"{prefix}_x": x, f"{prefix}_y": y, f"{prefix}_z": z}


def trial_row(record: TrialRecord) -> dict[str, Any]:
    return {
        "experiment": record.experiment,
        "point": record.point,
        "trial": record.trial,
        **_xyz("true", record.true_position),
        **_xyz("fix", record.fix_position),
        "error_m": record.error_m,
        "toa_error_s": record.toa_error_s,
        "bit_errors": record.bit_errors,
        "bits": record.bits,
        "detected": record.detected,
        "peak_energy": record.peak_energy,
    }


def report_summary(report: ExperimentReport) -> dict[str, Any]:
    """Everything but the per-trial records, which live in trials.csv."""
    return report.model_dump(exclude={"records"}) | {
        "trials": len(report.records),
        "points": report.points(),
    }


def write_report(report: ExperimentReport, out_dir: Path) -> dict[str, Path]:
    """Write the three report files into ``out_dir`` and return their paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "trials": write_table(
            out_dir / TRIALS_FILE,
            "trials",
            [trial_row(r) for r in report.records],
        ),
        "aggregates": write_table(
            out_dir / AGGREGATES_FILE,
            "aggregates",
            [
                {"experiment": report.experiment, **agg.model_dump()}
                for agg in report.aggregates
            ],
        ),
    }
    dump_yaml(report_summary(report), out_dir / REPORT_FILE)
    paths["report"] = out_dir / REPORT_FILE
    logger.info(
        f"Report for '{report.experiment}' written to {out_dir} "
        f"({len(report.records)} trial(s))"
    )
    return paths
