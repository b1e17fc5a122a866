"""
Scenario, anchor-map and experiment files.

All three are YAML documents validated by pydantic models; see
``scenarios/README.md`` for the keys.
"""

from __future__ import annotations

import logging
import math
from io import StringIO
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field
from ruamel.yaml import YAML

from src.core.common.base_parser import BaseConfigParser
from src.core.exceptions import ScenarioFileError
from src.models.base import Position, SimBase
from src.models.scenario import AnchorConfig, Scenario

logger = logging.getLogger(__name__)


class AnchorMap(SimBase):
    """Surveyed anchor positions used by the locator."""

    name: str = Field(default="anchors")
    anchors: list[AnchorConfig] = Field(default_factory=list)

    def positions(self) -> dict[int, Position]:
        return {a.id: a.position for a in self.anchors}


class ExperimentConfig(SimBase):
    """Parameters of one ``sweep`` run; CLI flags override the run settings."""

    experiment: str | None = Field(
        default=None, description="Experiment name; the CLI argument wins."
    )
    seed: int | None = Field(default=None, ge=0)
    trials: int | None = Field(default=None, ge=0, description="Trials per point.")
    workers: int = Field(default=1, ge=1)
    params: dict[str, Any] = Field(
        default_factory=dict, description="Overrides of the experiment defaults."
    )


def _require_mapping(data: Any, file_path: Path, what: str) -> dict[str, Any]:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ScenarioFileError(
            f"{what} must be a YAML mapping, got {type(data).__name__}",
            str(file_path),
        )
    return data


class ScenarioFileParser(BaseConfigParser[Scenario]):
    def _build(self, data: Any, file_path: Path) -> Scenario:
        scenario = Scenario.model_validate(
            _require_mapping(data, file_path, "A scenario file")
        )
        self._logger.info(
            f"Scenario '{scenario.name}': {len(scenario.anchors)} anchor(s), "
            f"cBeacon {'on' if scenario.cbeacon else 'off'}"
        )
        return scenario


class AnchorMapParser(BaseConfigParser[AnchorMap]):
    """
    Reads an anchor map. A scenario file works too: only its ``name`` and
    ``anchors`` keys are used.
    """

    def _build(self, data: Any, file_path: Path) -> AnchorMap:
        mapping = _require_mapping(data, file_path, "An anchor map")
        if "anchors" not in mapping:
            raise ScenarioFileError("Anchor map has no 'anchors' list", str(file_path))
        anchor_map = AnchorMap.model_validate(
            {k: mapping[k] for k in ("name", "anchors") if k in mapping}
        )
        ids = [a.id for a in anchor_map.anchors]
        if len(ids) != len(set(ids)):
            raise ScenarioFileError(
                f"Anchor ids must be distinct, got {sorted(ids)}", str(file_path)
            )
        return anchor_map


class ExperimentConfigParser(BaseConfigParser[ExperimentConfig]):
    def _build(self, data: Any, file_path: Path) -> ExperimentConfig:
        return ExperimentConfig.model_validate(
            _require_mapping(data, file_path, "An experiment file")
        )


def load_scenario(path: Path) -> Scenario:
    return ScenarioFileParser().parse(path)


def load_anchor_map(path: Path) -> AnchorMap:
    return AnchorMapParser().parse(path)


def load_experiment_config(path: Path) -> ExperimentConfig:
    return ExperimentConfigParser().parse(path)


def plain(obj: Any) -> Any:
    """Models, tuples and numpy scalars as plain YAML-friendly values."""
    if isinstance(obj, BaseModel):
        return plain(obj.model_dump())
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return plain(obj.item())
    if isinstance(obj, float) and math.isnan(obj):
        return None
    return obj


def _writer() -> YAML:
    yaml = YAML()
    yaml.indent(mapping=2, sequence=4, offset=2)
    yaml.default_flow_style = False
    yaml.width = 4096
    return yaml


def dump_yaml(data: Any, path: Path | None = None) -> str:
    """Block-style YAML text, also written to ``path`` when given."""
    stream = StringIO()
    _writer().dump(plain(data), stream)
    text = stream.getvalue()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {path}")
    return text
