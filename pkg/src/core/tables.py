"""
Versioned CSV tables.

Every table starts with a ``# schema: <name> v<version>`` line followed by a
plain pandas CSV, so files stay readable by spreadsheets that skip comments.
"""

import logging
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SCHEMAS: dict[str, list[str]] = {
    "detections": ["id", "b_start", "t_i", "peak_score", "parity_ok", "gamma", "tau"],
    "fixes": ["x", "y", "z", "beta", "residual_rms", "converged", "iterations"],
    "trials": [
        "experiment",
        "point",
        "trial",
        "true_x",
        "true_y",
        "true_z",
        "fix_x",
        "fix_y",
        "fix_z",
        "error_m",
        "toa_error_s",
        "bit_errors",
        "bits",
        "detected",
        "peak_energy",
    ],
    "aggregates": [
        "experiment",
        "point",
        "count",
        "median",
        "p90",
        "mean",
        "std",
        "success_rate",
    ],
    "bench": ["stage", "seconds", "repeat"],
    "spectrum": ["frequency_hz", "power_db"],
}


def schema_line(schema: str, version: int = SCHEMA_VERSION) -> str:
    return f"# schema: {schema} v{version}"


def to_frame(schema: str, rows: Sequence[Mapping[str, Any]]) -> pd.DataFrame:
    """Rows in the schema's column order; an empty table keeps its header."""
    try:
        columns = SCHEMAS[schema]
    except KeyError:
        raise ConfigurationError(
            f"Unknown table schema '{schema}'",
            field_name="schema",
            expected=sorted(SCHEMAS),
            actual=schema,
        ) from None
    return pd.DataFrame(list(rows), columns=columns)


def write_table(
    path: Path, schema: str, rows: Sequence[Mapping[str, Any]] | pd.DataFrame
) -> Path:
    frame = rows if isinstance(rows, pd.DataFrame) else to_frame(schema, rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(schema_line(schema) + "\n")
        frame.to_csv(handle, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} row(s) of '{schema}' to {path}")
    return path


def read_table(path: Path) -> tuple[str, pd.DataFrame]:
    """Schema name and data of a table written by ``write_table``."""
    with path.open(encoding="utf-8") as handle:
        first = handle.readline().strip()
        if not first.startswith("# schema:"):
            raise ConfigurationError(
                f"{path} has no schema line",
                field_name="schema",
                expected="# schema: <name> v<version>",
                actual=first[:40],
            )
        name = first.removeprefix("# schema:").strip().split()[0]
        return name, pd.read_csv(handle)
