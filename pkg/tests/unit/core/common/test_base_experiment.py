"""Unit tests for BaseExperiment and the trial pool."""

from __future__ import annotations

import logging
import math
from typing import Any, ClassVar

import pytest
from pytest_mock import MockerFixture

from src.core.common.base_experiment import BaseExperiment, TrialSpec, run_trials
from src.core.exceptions import ExperimentError
from src.core.protocols import Experiment
from src.models.report import TrialRecord

# -------- Concrete fakes for testing --------


class EchoExperiment(BaseExperiment):
    """Error equals the swept value plus a tenth of the trial index."""

    name = "echo"
    description = "Echoes its sweep values"
    defaults: ClassVar[dict[str, Any]] = {"values": [1.0, 2.0], "offset": 0.0}

    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        return [(f"v={v:g}", v) for v in params["values"]]

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        return TrialRecord(
            experiment=spec.experiment,
            point=spec.point,
            trial=spec.trial,
            error_m=spec.value + spec.params["offset"] + spec.trial / 10,
            detected=True,
        )


class FlakyExperiment(EchoExperiment):
    """Fails every trial with an odd index."""

    name = "flaky"
    rank_failures = True

    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        if spec.trial % 2:
            return TrialRecord(
                experiment=spec.experiment, point=spec.point, trial=spec.trial
            )
        return super().run_trial(spec)


def _double(spec: TrialSpec) -> int:
    return spec.index * 2


def _specs(n: int) -> list[TrialSpec]:
    return [
        TrialSpec(experiment="x", point="p", value=None, trial=i, index=i, seed=0)
        for i in range(n)
    ]


# ------------------------- Tests -------------------------


class TestRunTrials:
    def test_in_process_keeps_order(self) -> None:
        assert run_trials(_double, _specs(4)) == [0, 2, 4, 6]

    def test_workers_use_joblib(self, mocker: MockerFixture) -> None:
        parallel = mocker.patch("src.core.common.base_experiment.Parallel")
        parallel.return_value.side_effect = lambda tasks: [
            fn(*args, **kwargs) for fn, args, kwargs in tasks
        ]
        assert run_trials(_double, _specs(3), workers=2) == [0, 2, 4]
        parallel.assert_called_once_with(n_jobs=2)

    def test_single_spec_stays_in_process(self, mocker: MockerFixture) -> None:
        parallel = mocker.patch("src.core.common.base_experiment.Parallel")
        assert run_trials(_double, _specs(1), workers=4) == [0]
        parallel.assert_not_called()

    def test_progress_bar(self, mocker: MockerFixture) -> None:
        bar = mocker.patch(
            "src.core.common.base_experiment.tqdm", side_effect=lambda it, **kw: it
        )
        run_trials(_double, _specs(2), progress=True, desc="echo")
        assert bar.call_args.kwargs["disable"] is False
        assert bar.call_args.kwargs["desc"] == "echo"


class TestBaseExperiment:
    @pytest.fixture
    def experiment(self) -> EchoExperiment:
        return EchoExperiment()

    def test_implements_protocol(self, experiment: EchoExperiment) -> None:
        assert isinstance(experiment, Experiment)

    # --- parameters ---

    def test_resolve_params_merges_defaults(self, experiment: EchoExperiment) -> None:
        assert experiment.resolve_params({"offset": 1.0}) == {
            "values": [1.0, 2.0],
            "offset": 1.0,
        }

    def test_unknown_param(self, experiment: EchoExperiment) -> None:
        with pytest.raises(ExperimentError, match="Unknown parameter"):
            experiment.run({"ofset": 1.0}, seed=0, trials=1)

    @pytest.mark.parametrize("seed, trials", [(-1, 1), (0, -1)])
    def test_negative_counts(
        self, experiment: EchoExperiment, seed: int, trials: int
    ) -> None:
        with pytest.raises(ExperimentError, match="non-negative"):
            experiment.run({}, seed=seed, trials=trials)

    # --- trials ---

    def test_build_trials_order(self, experiment: EchoExperiment) -> None:
        specs = experiment.build_trials(experiment.resolve_params({}), 5, 3)
        assert [(s.point, s.trial, s.index) for s in specs] == [
            ("v=1", 0, 0),
            ("v=1", 1, 1),
            ("v=1", 2, 2),
            ("v=2", 0, 3),
            ("v=2", 1, 4),
            ("v=2", 2, 5),
        ]
        assert {s.seed for s in specs} == {5}

    def test_run_aggregates_per_point(self, experiment: EchoExperiment) -> None:
        report = experiment.run({"offset": 0.5}, seed=3, trials=3)
        assert report.experiment == "echo"
        assert report.seed == 3
        assert report.config == {
            "params": {"values": [1.0, 2.0], "offset": 0.5},
            "trials": 3,
        }
        assert report.points() == ["v=1", "v=2"]
        first = report.aggregate_for("v=1")
        assert first is not None
        assert first.count == 3
        assert first.median == pytest.approx(1.6)
        assert first.success_rate == 1.0

    def test_zero_trials_gives_empty_report(self, experiment: EchoExperiment) -> None:
        report = experiment.run({}, seed=0, trials=0)
        assert report.records == []
        assert report.aggregates == []
        assert report.series == {}

    def test_worker_count_does_not_change_report(
        self, experiment: EchoExperiment, mocker: MockerFixture
    ) -> None:
        serial = experiment.run({}, seed=1, trials=2)
        parallel = mocker.patch("src.core.common.base_experiment.Parallel")
        parallel.return_value.side_effect = lambda tasks: [
            fn(*args, **kwargs) for fn, args, kwargs in tasks
        ]
        assert experiment.run({}, seed=1, trials=2, workers=3) == serial

    def test_failures_ranked_and_logged(
        self, caplog: pytest.LogCaptureFixture
    ) -> None:
        caplog.set_level(logging.WARNING)
        report = FlakyExperiment().run({"values": [1.0]}, seed=0, trials=3)
        agg = report.aggregates[0]
        assert agg.success_rate == pytest.approx(2 / 3)
        assert agg.median == pytest.approx(1.2)
        assert agg.p90 == math.inf
        assert "1/3 trial(s) detected nothing usable" in caplog.text

    def test_get_experiment_info(self, experiment: EchoExperiment) -> None:
        info = experiment.get_experiment_info()
        assert info["name"] == "echo"
        assert info["defaults"] == {"values": [1.0, 2.0], "offset": 0.0}
        assert info["rank_failures"] is False
