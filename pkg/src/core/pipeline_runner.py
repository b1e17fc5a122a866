"""Pipeline runner for orchestrating the receiver stages."""

import logging
from typing import TYPE_CHECKING, Any

from .exceptions import UpsSimError
from .protocols import PipelineStage

if TYPE_CHECKING:
    from src.detector.context import ReceiverContext

logger = logging.getLogger(__name__)


class PipelineRunner:
    """
    Coordinates the execution of receiver stages in sequence.

    The PipelineRunner passes one ReceiverContext through every stage, so each
    stage can build on the results of the ones before it.
    """

    def __init__(self, stages: list[PipelineStage] | None = None):
        """
        Initialize the pipeline runner.

        Args:
            stages: List of stages to execute in order
        """
        self._logger = logger.getChild(self.__class__.__name__)
        self._stages: list[PipelineStage] = stages or []

    def add_stage(self, stage: PipelineStage) -> "PipelineRunner":
        """
        Add a stage to the pipeline.

        Args:
            stage: The stage to add

        Returns:
            Self for method chaining
        """
        self._stages.append(stage)
        return self

    def clear_stages(self) -> "PipelineRunner":
        """
        Clear all stages from the pipeline.

        Returns:
            Self for method chaining
        """
        self._stages.clear()
        return self

    def get_stages(self) -> list[PipelineStage]:
        """
        Get the current list of stages.

        Returns:
            List of configured stages
        """
        return self._stages.copy()

    def execute(self, context: "ReceiverContext") -> "ReceiverContext":
        """
        Execute the configured stages on a context.

        Args:
            context: Receiver state to enrich

        Returns:
            The same context, enriched by every stage

        Raises:
            ValueError: If no stages are configured
            UpsSimError: Domain errors raised by a stage, unchanged
            RuntimeError: If a stage fails unexpectedly
        """
        if not self._stages:
            raise ValueError("No stages configured")

        self._logger.info("Starting pipeline execution")
        for i, stage in enumerate(self._stages):
            self._logger.debug(
                f"Executing stage {i + 1}/{len(self._stages)}: {stage.name}"
            )
            try:
                stage.execute(context)
            except UpsSimError as e:
                self._logger.error(f"Stage {stage.name} failed: {e}")
                raise
            except Exception as e:
                self._logger.error(f"Stage {stage.name} failed: {e}")
                raise RuntimeError(f"Pipeline execution failed: {e}") from e
        self._logger.info("Pipeline execution completed successfully")
        return context

    def get_pipeline_info(self) -> dict[str, Any]:
        """
        Get information about the current pipeline configuration.

        Returns:
            Dictionary with pipeline metadata and stage information
        """
        stage_info = []
        for stage in self._stages:
            try:
                stage_info.append(stage.get_stage_info())
            except Exception as e:
                self._logger.warning(
                    f"Could not get info for stage {stage.__class__.__name__}: {e}"
                )
                stage_info.append({"name": stage.__class__.__name__, "error": str(e)})

        return {
            "runner_class": self.__class__.__name__,
            "stage_count": len(self._stages),
            "stages": stage_info,
        }
