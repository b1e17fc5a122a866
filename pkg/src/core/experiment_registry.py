"""Experiment registry for managing the reproducible experiments."""

import logging
from typing import Any

from .exceptions import ExperimentError
from .protocols import Experiment

logger = logging.getLogger(__name__)


class ExperimentRegistry:
    """
    Registry for managing available experiments.

    Maps experiment names to their classes, so the CLI can list them and
    instantiate one by name.
    """

    def __init__(self):
        """Initialize the experiment registry."""
        self._experiments: dict[str, type[Experiment]] = {}
        self._logger = logger.getChild(self.__class__.__name__)

    def register_experiment(
        self, name: str, experiment_class: type[Experiment]
    ) -> None:
        """
        Register an experiment class under a name.

        Args:
            name: The experiment name (e.g., 'cdf-2d', 'toa-stability')
            experiment_class: The experiment class to register

        Raises:
            ValueError: If the name is empty or experiment_class is invalid
        """
        if not name or not name.strip():
            raise ValueError("Experiment name cannot be empty")

        if not experiment_class:
            raise ValueError("Experiment class cannot be None")

        name = name.strip().lower()

        if name in self._experiments:
            self._logger.warning(
                f"Overwriting existing experiment registration for '{name}'"
            )

        self._experiments[name] = experiment_class
        self._logger.debug(
            f"Registered experiment '{experiment_class.__name__}' as '{name}'"
        )

    def get_experiment_class(self, name: str) -> type[Experiment]:
        """
        Get the experiment class registered under a name.

        Raises:
            ExperimentError: If the name is not registered
        """
        if not name:
            raise ExperimentError("Experiment name cannot be empty")

        name = name.strip().lower()

        if name not in self._experiments:
            available = ", ".join(self.get_available_names()) or "none"
            raise ExperimentError(
                f"Unknown experiment '{name}'. Available experiments: {available}",
                experiment=name,
            )

        return self._experiments[name]

    def create_experiment(self, name: str) -> Experiment:
        """
        Create an instance of the named experiment.

        Raises:
            ExperimentError: If the name is not registered
            RuntimeError: If instantiation fails
        """
        experiment_class = self.get_experiment_class(name)

        try:
            return experiment_class()
        except Exception as e:
            raise RuntimeError(
                f"Failed to create experiment '{experiment_class.__name__}' "
                f"for '{name}': {e}"
            ) from e

    def get_available_names(self) -> list[str]:
        """Sorted names of every registered experiment."""
        return sorted(self._experiments.keys())

    def is_available(self, name: str) -> bool:
        if not name:
            return False

        return name.strip().lower() in self._experiments

    def get_experiment_info(self, name: str) -> dict[str, Any]:
        """
        Get information about a registered experiment.

        Falls back to class-level details when the experiment cannot be
        instantiated.
        """
        experiment_class = self.get_experiment_class(name)

        try:
            return self.create_experiment(name).get_experiment_info()
        except Exception as e:
            self._logger.warning(f"Could not get experiment info for '{name}': {e}")
            return {
                "name": name,
                "class": experiment_class.__module__
                + "."
                + experiment_class.__qualname__,
                "error": f"Could not instantiate: {e}",
            }

    def clear(self) -> None:
        """Clear all registered experiments."""
        self._experiments.clear()
        self._logger.info("Cleared all experiment registrations")

    def __len__(self) -> int:
        return len(self._experiments)

    def __contains__(self, name: str) -> bool:
        return self.is_available(name)


# Global experiment registry instance
_global_registry = ExperimentRegistry()


def get_global_registry() -> ExperimentRegistry:
    """Get the global experiment registry instance."""
    return _global_registry


def register_builtin_experiments() -> None:
    """Register all built-in experiments with the global registry."""
    # Import here to avoid circular imports
    from src.harness.experiments import BUILTIN_EXPERIMENTS

    registry = get_global_registry()

    # Only register if not already registered to avoid duplicate warnings
    for experiment_class in BUILTIN_EXPERIMENTS:
        if not registry.is_available(experiment_class.name):
            registry.register_experiment(experiment_class.name, experiment_class)
