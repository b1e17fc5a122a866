"""Anchor-geometry diagnostics and deployment layouts."""

import numpy as np

from src.core.exceptions import ConfigurationError, DegenerateGeometryError
from src.models.base import Position
from src.models.positioning import PseudoRangeSet
from src.models.scenario import AnchorConfig

from .trilateration import CONDITION_LIMIT, jacobian


def gdop(prs: PseudoRangeSet, at: Position, dims: int = 3) -> float:
    """
    Geometric dilution of precision at ``at``.

    Uses the linearized pseudo-range model with rows ``[u_i, -1]``; the clock
    term counts as an unknown, so this is the GDOP including time.
    """
    if len(prs) < dims + 1:
        raise DegenerateGeometryError(np.inf)
    theta = np.append(np.asarray(at, dtype=np.float64)[:dims], 0.0)
    singular = np.linalg.svd(
        jacobian(theta, prs, dims, float(at[2])), compute_uv=False
    )
    if singular[-1] == 0.0 or singular[0] / singular[-1] > CONDITION_LIMIT:
        raise DegenerateGeometryError(
            np.inf if singular[-1] == 0.0 else singular[0] / singular[-1]
        )
    return float(np.sqrt(np.sum(1.0 / singular**2)))


def room_deployment(
    length: float,
    width: float,
    height: float,
    n_x: int,
    n_y: int,
    first_id: int = 0,
    transducers: int = 1,
) -> list[AnchorConfig]:
    """
    Ceiling grid of ``n_x * n_y`` anchors at cell centres, ids row by row.

    The 9 m x 3 m evaluation room with 5 x 3 anchors is
    ``room_deployment(9, 3, 3, 5, 3)``.
    """
    if n_x < 1 or n_y < 1:
        raise ConfigurationError(
            "A deployment needs at least one anchor per axis",
            field_name="n_x/n_y",
            expected=">= 1",
            actual=(n_x, n_y),
        )
    if min(length, width, height) <= 0:
        raise ConfigurationError(
            "Room dimensions must be positive",
            field_name="length/width/height",
            actual=(length, width, height),
        )
    xs = (np.arange(n_x) + 0.5) * length / n_x
    ys = (np.arange(n_y) + 0.5) * width / n_y
    anchors = []
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            anchors.append(
                AnchorConfig(
                    id=first_id + j * n_x + i,
                    position=(float(x), float(y), float(height)),
                    transducers=transducers,
                )
            )
    return anchors
