from .geometry import gdop, room_deployment
from .trilateration import (
    Trilaterator,
    estimate_range,
    estimate_ranges,
    jacobian,
    residuals,
    trilaterate,
)

__all__ = [
    "Trilaterator",
    "estimate_range",
    "estimate_ranges",
    "gdop",
    "jacobian",
    "residuals",
    "room_deployment",
    "trilaterate",
]
