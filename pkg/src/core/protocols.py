from pathlib import Path
from typing import TYPE_CHECKING, Any, Protocol, runtime_checkable

if TYPE_CHECKING:
    from src.detector.context import ReceiverContext
    from src.models.report import ExperimentReport


@runtime_checkable
class PipelineStage(Protocol):
    """Defines the contract for one step of the receiver chain."""

    name: str

    def execute(self, context: "ReceiverContext") -> None:
        """
        Run this stage, reading earlier results from the context and storing
        its own.

        Args:
            context: Shared receiver state for one recording
        """
        ...

    def get_stage_info(self) -> dict[str, Any]:
        """
        Get information about this stage.

        Returns:
            Dictionary with stage metadata (name, inputs, outputs)
        """
        ...


@runtime_checkable
class ScenarioParser(Protocol):
    """Defines the contract for reading a configuration file."""

    def get_supported_extensions(self) -> list[str]:
        """Returns the list of file extensions supported (e.g., [".yaml"])."""
        ...

    def can_parse(self, file_path: Path) -> bool:
        """
        Checks whether this parser can handle the given file.

        Args:
            file_path: Path to the file to check

        Returns:
            True if the parser can handle this path, False otherwise
        """
        ...

    def parse(self, file_path: Path) -> Any:
        """Parses a single file into a validated model."""
        ...


@runtime_checkable
class Experiment(Protocol):
    """Defines the contract for a registered experiment."""

    name: str
    description: str

    def run(
        self,
        params: dict[str, Any],
        seed: int,
        trials: int,
        workers: int = 1,
        progress: bool = False,
    ) -> "ExperimentReport":
        """
        Run every trial of every sweep point.

        Args:
            params: Experiment parameters overriding the defaults
            seed: Root seed; equal seeds give equal reports
            trials: Trials per sweep point
            workers: Worker processes (1 runs in-process)
            progress: Show a progress bar

        Returns:
            The per-trial records and per-point aggregates
        """
        ...

    def get_experiment_info(self) -> dict[str, Any]:
        """
        Get information about this experiment.

        Returns:
            Dictionary with experiment metadata (name, description, defaults)
        """
        ...
