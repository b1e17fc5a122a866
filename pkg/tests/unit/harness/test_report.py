"""Unit tests for experiment report files."""

from __future__ import annotations

from pathlib import Path

import pytest
from ruamel.yaml import YAML

from src.core.tables import read_table
from src.harness.report import (
    AGGREGATES_FILE,
    REPORT_FILE,
    TRIALS_FILE,
    report_summary,
    trial_row,
    write_report,
)
from src.models.report import AggregateStats, ExperimentReport, TrialRecord


@pytest.fixture
def report() -> ExperimentReport:
    records = [
        TrialRecord(
            experiment="cdf-2d",
            point="2d",
            trial=0,
            true_position=(1.0, 2.0, 1.0),
            fix_position=(1.02, 1.99, 1.0),
            error_m=0.0224,
            detected=True,
        ),
        TrialRecord(
            experiment="cdf-2d", point="2d", trial=1, true_position=(3.0, 1.0, 1.0)
        ),
    ]
    return ExperimentReport(
        experiment="cdf-2d",
        seed=4,
        config={"params": {"snr_db": 10.0}, "trials": 2},
        records=records,
        aggregates=[AggregateStats.from_values("2d", [0.0224, None])],
        series={"cdf": [0.0224]},
    )


class TestTrialRow:
    def test_positions_flattened(self, report: ExperimentReport) -> None:
        row = trial_row(report.records[0])
        assert (row["true_x"], row["true_y"], row["true_z"]) == (1.0, 2.0, 1.0)
        assert row["fix_x"] == pytest.approx(1.02)
        assert row["detected"] is True

    def test_missing_fix(self, report: ExperimentReport) -> None:
        row = trial_row(report.records[1])
        assert row["fix_x"] is None
        assert row["error_m"] is None


class TestWriteReport:
    def test_three_files(self, report: ExperimentReport, tmp_path: Path) -> None:
        out = tmp_path / "results" / "cdf"
        paths = write_report(report, out)
        assert paths == {
            "trials": out / TRIALS_FILE,
            "aggregates": out / AGGREGATES_FILE,
            "report": out / REPORT_FILE,
        }

        name, trials = read_table(paths["trials"])
        assert name == "trials"
        assert list(trials["trial"]) == [0, 1]
        assert trials["error_m"].isna().tolist() == [False, True]

        name, aggregates = read_table(paths["aggregates"])
        assert name == "aggregates"
        assert aggregates.loc[0, "experiment"] == "cdf-2d"
        assert aggregates.loc[0, "success_rate"] == pytest.approx(0.5)

        summary = YAML(typ="safe").load(paths["report"].read_text(encoding="utf-8"))
        assert summary["experiment"] == "cdf-2d"
        assert summary["seed"] == 4
        assert summary["trials"] == 2
        assert summary["points"] == ["2d"]
        assert summary["series"] == {"cdf": [0.0224]}
        assert "records" not in summary

    def test_empty_report(self, tmp_path: Path) -> None:
        empty = ExperimentReport(experiment="noise-free", seed=0)
        paths = write_report(empty, tmp_path)
        _, trials = read_table(paths["trials"])
        _, aggregates = read_table(paths["aggregates"])
        assert trials.empty
        assert aggregates.empty
        assert report_summary(empty)["trials"] == 0
