"""
Position and clock term from pseudo-ranges.

Each anchor contributes ``c*t_i = |U_i - P| + beta`` where ``beta`` collects
the receiver's unknown clock offset and the common transmit epoch. The fit
minimizes the squared residuals over (P, beta) with Levenberg-Marquardt; in
2D the receiver height is held fixed.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from src.core.exceptions import (
    ConfigurationError,
    DegenerateGeometryError,
    InsufficientAnchorsError,
)
from src.models.base import Position
from src.models.positioning import PositionFix, PseudoRangeSet
from src.models.scenario import LocatorConfig

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8
LAMBDA_INIT = 1e-3
LAMBDA_MAX = 1e12
OUTLIER_FACTOR = 3.0
# Residual medians below this are treated as exact data.
OUTLIER_FLOOR_M = 1e-3


def _unpack(theta: np.ndarray, dims: int, height: float) -> tuple[np.ndarray, float]:
    if dims == 3:
        return theta[:3], float(theta[3])
    return np.array([theta[0], theta[1], height]), float(theta[2])


def residuals(
    theta: np.ndarray, prs: PseudoRangeSet, dims: int = 3, height: float = 0.0
) -> np.ndarray:
    """``c*t_i - beta - |U_i - P|`` for parameters (x, y[, z], beta)."""
    position, beta = _unpack(theta, dims, height)
    distances = np.linalg.norm(prs.anchors - position, axis=1)
    return prs.pseudo_ranges - beta - distances


def jacobian(
    theta: np.ndarray, prs: PseudoRangeSet, dims: int = 3, height: float = 0.0
) -> np.ndarray:
    """Derivative of :func:`residuals` with respect to (x, y[, z], beta)."""
    position, _ = _unpack(theta, dims, height)
    offsets = prs.anchors - position
    distances = np.linalg.norm(offsets, axis=1)
    units = offsets / np.maximum(distances, 1e-12)[:, None]
    return np.column_stack([units[:, :dims], -np.ones(len(prs))])


def _check_geometry(jac: np.ndarray) -> None:
    singular = np.linalg.svd(jac, compute_uv=False)
    condition = np.inf if singular[-1] == 0.0 else singular[0] / singular[-1]
    if condition > CONDITION_LIMIT:
        raise DegenerateGeometryError(condition)


def _levenberg_marquardt(
    theta: np.ndarray,
    prs: PseudoRangeSet,
    dims: int,
    height: float,
    max_iterations: int,
    step_tolerance: float,
) -> tuple[np.ndarray, int, bool]:
    """
    Damped Gauss-Newton with lambda starting at LAMBDA_INIT, divided by ten on
    an accepted step and multiplied by ten on a rejected one. That schedule is
    fixed, which ``scipy.optimize.least_squares`` does not expose.
    """
    lam = LAMBDA_INIT
    r = residuals(theta, prs, dims, height)
    cost = float(r @ r)
    for iteration in range(1, max_iterations + 1):
        jac = jacobian(theta, prs, dims, height)
        normal = jac.T @ jac
        gradient = jac.T @ r
        damped = normal + lam * np.diag(np.diag(normal))
        try:
            step = np.linalg.solve(damped, -gradient)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        candidate = theta + step
        r_new = residuals(candidate, prs, dims, height)
        cost_new = float(r_new @ r_new)
        if cost_new < cost:
            theta, r, cost = candidate, r_new, cost_new
            lam = max(lam / 10.0, 1e-15)
        else:
            lam *= 10.0
        if np.linalg.norm(step[:dims]) < step_tolerance:
            return theta, iteration, True
        if lam > LAMBDA_MAX:
            break
    return theta, min(iteration, max_iterations), False


def _initial_theta(
    prs: PseudoRangeSet, dims: int, height: float, init: Position | None
) -> np.ndarray:
    start = np.mean(prs.anchors, axis=0) if init is None else np.asarray(init)
    if dims == 3:
        return np.array([start[0], start[1], start[2], 0.0])
    return np.array([start[0], start[1], 0.0])


def linear_initial_guess(
    prs: PseudoRangeSet, dims: int = 3, height: float = 0.0
) -> np.ndarray | None:
    """
    Closed-form (x, y[, z], beta) from the squared pseudo-range equations.

    Squaring ``rho_i - beta = |U_i - P|`` gives equations linear in P, beta
    and ``beta**2 - |P|**2``; the last is solved for as a free unknown. Exact
    data gives the exact answer. Returns None when the anchors cannot pin
    every unknown down.
    """
    anchors = prs.anchors
    rho = prs.pseudo_ranges
    rhs = np.sum(anchors**2, axis=1) - rho**2
    if dims == 2:
        rhs = rhs - 2.0 * height * anchors[:, 2]
    a = np.column_stack([2.0 * anchors[:, :dims], -2.0 * rho, np.ones(len(prs))])
    if len(prs) < a.shape[1]:
        return None
    solution, _, rank, _ = np.linalg.lstsq(a, rhs, rcond=None)
    if rank < a.shape[1] or not np.all(np.isfinite(solution)):
        return None
    return solution[: dims + 1]


def _solve_once(
    prs: PseudoRangeSet,
    dims: int,
    height: float,
    init: Position | None,
    max_iterations: int,
    step_tolerance: float,
) -> tuple[np.ndarray, int, bool]:
    """LM from the centroid (or ``init``) and from the linear guess."""
    if len(prs) < dims + 1:
        raise InsufficientAnchorsError(len(prs), dims)
    theta = _initial_theta(prs, dims, height, init)
    _check_geometry(jacobian(theta, prs, dims, height))
    starts = [theta]
    guess = linear_initial_guess(prs, dims, height)
    if guess is not None:
        starts.append(guess)

    results = [
        _levenberg_marquardt(start, prs, dims, height, max_iterations, step_tolerance)
        for start in starts
    ]
    # Lowest final cost wins; ties keep the earlier start.
    costs = [np.sum(residuals(r[0], prs, dims, height) ** 2) for r in results]
    return results[int(np.argmin(np.nan_to_num(costs, nan=np.inf)))]


def trilaterate(
    prs: PseudoRangeSet,
    dims: int = 3,
    init: Position | None = None,
    *,
    height: float | None = None,
    reject_outliers: bool = False,
    max_iterations: int = 100,
    step_tolerance: float = 1e-9,
    max_residual: float | None = None,
) -> PositionFix:
    """
    Solve for the receiver position and clock term.

    Runs LM from the anchor centroid (or ``init``) with beta = 0 and from a
    closed-form linear guess, keeping the lower-cost result. A fix that hits
    the iteration limit, or whose residual RMS exceeds ``max_residual``, is
    returned with ``converged=False``.
    """
    if dims not in (2, 3):
        raise ConfigurationError(
            "Trilateration runs in 2 or 3 dimensions",
            field_name="dims",
            expected="2 or 3",
            actual=dims,
        )
    if dims == 2:
        if height is None:
            if init is None:
                raise ConfigurationError(
                    "A 2D solve needs the receiver height",
                    field_name="height",
                    expected="a height in meters",
                )
            height = float(init[2])
    else:
        height = 0.0

    theta, iterations, converged = _solve_once(
        prs, dims, height, init, max_iterations, step_tolerance
    )
    used, rejected = prs, ()
    if reject_outliers and len(prs) > dims + 1:
        r = np.abs(residuals(theta, prs, dims, height))
        limit = OUTLIER_FACTOR * max(float(np.median(r)), OUTLIER_FLOOR_M)
        keep = r <= limit
        if not keep.all() and keep.sum() >= dims + 1:
            rejected = tuple(i for i, k in zip(prs.ids, keep, strict=True) if not k)
            logger.info(f"Rejected outlier anchor(s) {list(rejected)}")
            used = prs.subset(keep)
            theta, more, converged = _solve_once(
                used, dims, height, init, max_iterations, step_tolerance
            )
            iterations += more

    position, beta = _unpack(theta, dims, height)
    r = residuals(theta, used, dims, height)
    rms = float(np.sqrt(np.mean(r**2)))
    if converged and max_residual is not None and rms > max_residual:
        logger.warning(
            f"Fix settled with residual {rms:.4f} m above {max_residual} m; "
            "treating it as a local minimum"
        )
        converged = False
    elif converged:
        logger.info(
            f"Fix converged after {iterations} iteration(s), residual {rms:.4f} m"
        )
    else:
        logger.warning(
            f"Fix did not converge after {iterations} iteration(s); "
            f"returning the best iterate (residual {rms:.4f} m)"
        )
    return PositionFix(
        position=(float(position[0]), float(position[1]), float(position[2])),
        clock_term=beta,
        residual_rms=rms if np.isfinite(rms) else float("inf"),
        iterations=iterations,
        converged=converged and bool(np.isfinite(rms)),
        dims=dims,
        used_ids=used.ids,
        rejected_ids=rejected,
    )


class Trilaterator:
    """Scenario-configured solver."""

    def __init__(self, cfg: LocatorConfig, height: float | None = None) -> None:
        self._logger = logger.getChild(self.__class__.__name__)
        self.cfg = cfg
        self.height = cfg.height if cfg.height is not None else height

    def solve(
        self, prs: PseudoRangeSet, init: Position | None = None
    ) -> PositionFix:
        self._logger.debug(f"Solving {self.cfg.dims}D fix from {len(prs)} anchors")
        return trilaterate(
            prs,
            self.cfg.dims,
            init,
            height=self.height,
            reject_outliers=self.cfg.reject_outliers,
            max_iterations=self.cfg.max_iterations,
            step_tolerance=self.cfg.step_tolerance,
            max_residual=self.cfg.max_residual_m,
        )


def estimate_range(toa_s: float, c: float, reference_distance: float) -> float:
    """Distance to a target anchor from its ToA relative to a reference anchor."""
    return c * toa_s + reference_distance


def estimate_ranges(
    toas: Sequence[float], c: float, reference_distance: float
) -> np.ndarray:
    return c * np.asarray(toas, dtype=np.float64) + reference_distance
