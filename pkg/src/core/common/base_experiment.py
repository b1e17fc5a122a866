"""Base implementation for experiments and the trial pool they run in."""

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, ClassVar, TypeVar

from joblib import Parallel, delayed
from tqdm import tqdm

from src.models.report import AggregateStats, ExperimentReport, TrialRecord

from ..exceptions import ExperimentError
from ..protocols import Experiment

logger = logging.getLogger(__name__)

R = TypeVar("R")


@dataclass(frozen=True)
class TrialSpec:
    """
    One trial of one sweep point.

    ``trial`` restarts at 0 for every point and keys the random streams, so
    the same trial index sees the same noise at every point. ``index`` is the
    position in the whole run.
    """

    experiment: str
    point: str
    value: Any
    trial: int
    index: int
    seed: int
    params: dict[str, Any] = field(default_factory=dict)


def run_trials(
    fn: Callable[[TrialSpec], R],
    specs: Sequence[TrialSpec],
    workers: int = 1,
    progress: bool = False,
    desc: str = "trials",
) -> list[R]:
    """
    Apply ``fn`` to every spec, in worker processes when ``workers > 1``.

    Results come back in spec order whatever the worker count.
    """
    items = tqdm(specs, desc=desc, unit="trial", disable=not progress)
    if workers <= 1 or len(specs) <= 1:
        return [fn(spec) for spec in items]
    logger.debug(f"Running {len(specs)} trial(s) on {workers} worker(s)")
    return list(Parallel(n_jobs=workers)(delayed(fn)(spec) for spec in items))


class BaseExperiment(Experiment, ABC):
    """
    Abstract base class for experiments.

    Expands parameters into sweep points, runs ``trials`` trials per point
    through the trial pool and summarizes the records per point.

    Subclasses must implement:
    - sweep(): Labelled values of the swept parameter
    - run_trial(): Simulate one trial and return its record

    Subclasses can optionally override:
    - aggregate(): Per-point statistics (default: error_m)
    - series(): Extra plot data for the report
    """

    name: str = ""
    description: str = ""
    defaults: ClassVar[dict[str, Any]] = {}
    # Rank failed trials as unbounded errors in medians and percentiles.
    rank_failures: ClassVar[bool] = False

    def __init__(self) -> None:
        self._logger = logger.getChild(self.__class__.__name__)

    def resolve_params(self, params: dict[str, Any] | None) -> dict[str, Any]:
        """
        Defaults overridden by ``params``.

        Raises:
            ExperimentError: If a parameter is not one of the defaults
        """
        params = dict(params or {})
        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise ExperimentError(
                f"Unknown parameter(s) {unknown} for '{self.name}'. "
                f"Known: {sorted(self.defaults)}",
                experiment=self.name,
            )
        return {**self.defaults, **params}

    @abstractmethod
    def sweep(self, params: dict[str, Any]) -> list[tuple[str, Any]]:
        """
        Sweep points as (label, value) pairs, in report order.

        Args:
            params: Resolved parameters

        Returns:
            One entry per point
        """
        pass

    @abstractmethod
    def run_trial(self, spec: TrialSpec) -> TrialRecord:
        """
        Simulate one trial.

        Runs in a worker process when the pool is parallel, so it must depend
        on nothing but ``spec``.
        """
        pass

    def build_trials(
        self, params: dict[str, Any], seed: int, trials: int
    ) -> list[TrialSpec]:
        specs = []
        for label, value in self.sweep(params):
            for trial in range(trials):
                specs.append(
                    TrialSpec(
                        experiment=self.name,
                        point=label,
                        value=value,
                        trial=trial,
                        index=len(specs),
                        seed=seed,
                        params=params,
                    )
                )
        return specs

    def aggregate(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> list[AggregateStats]:
        points: dict[str, list[TrialRecord]] = {}
        for record in records:
            points.setdefault(record.point, []).append(record)
        return [
            AggregateStats.from_values(
                point,
                [r.error_m for r in group],
                rank_failures=self.rank_failures,
            )
            for point, group in points.items()
        ]

    def series(
        self, records: list[TrialRecord], params: dict[str, Any]
    ) -> dict[str, list[float]]:
        return {}

    def run(
        self,
        params: dict[str, Any],
        seed: int,
        trials: int,
        workers: int = 1,
        progress: bool = False,
    ) -> ExperimentReport:
        """
        Run every trial of every sweep point.

        Raises:
            ExperimentError: If parameters or counts are invalid
        """
        if trials < 0:
            raise ExperimentError(
                f"Trials per point must be non-negative, got {trials}",
                experiment=self.name,
            )
        if seed < 0:
            raise ExperimentError(
                f"Seed must be non-negative, got {seed}", experiment=self.name
            )
        resolved = self.resolve_params(params)
        specs = self.build_trials(resolved, seed, trials)
        self._logger.info(
            f"Running '{self.name}': {len(specs)} trial(s), seed {seed}, "
            f"{max(workers, 1)} worker(s)"
        )

        records = run_trials(self.run_trial, specs, workers, progress, self.name)

        aggregates = self.aggregate(records, resolved) if records else []
        report = ExperimentReport(
            experiment=self.name,
            description=self.description,
            seed=seed,
            config={"params": resolved, "trials": trials},
            records=records,
            aggregates=aggregates,
            series=self.series(records, resolved) if records else {},
        )
        missed = sum(not r.detected for r in records)
        if missed:
            self._logger.warning(
                f"{missed}/{len(records)} trial(s) detected nothing usable"
            )
        self._logger.info(f"Finished '{self.name}' with {len(aggregates)} point(s)")
        return report

    def get_experiment_info(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "defaults": dict(self.defaults),
            "rank_failures": self.rank_failures,
        }
