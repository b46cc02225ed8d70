"""
Cumulative composite Simpson integration on a uniform grid, with
singular-window handling for samples that could not be evaluated.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from src.utils.errors import ParameterError, ThermoDuetError
from src.utils.parameters import REFINEMENT_LEVELS

logger = logging.getLogger(__name__)


def check_uniform_grid(grid: np.ndarray, rtol: float = 1e-9) -> float:
    """
    Validate a strictly increasing uniform grid.

    Returns:
        Grid step
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ParameterError("time grid needs at least two points")
    steps = np.diff(grid)
    if np.any(steps <= 0):
        raise ParameterError("time grid must be strictly increasing")
    step = float(steps.mean())
    if np.max(np.abs(steps - step)) > rtol * max(abs(grid[-1]), step):
        raise ParameterError("time grid must be uniform")
    return step


def simpson_segment(func: Callable[[float], float], a: float, b: float, n: int = 4) -> float:
    """Composite Simpson rule with n (even) panels on [a, b]."""
    x = np.linspace(a, b, n + 1)
    y = np.array([func(xi) for xi in x])
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float((b - a) / (3.0 * n) * np.dot(weights, y))


def approach_singularity(
    func: Callable[[float], float],
    start: float,
    singular: float,
    tolerance: float,
    levels: int = REFINEMENT_LEVELS
) -> Optional[float]:
    """
    Integrate from `start` toward a singular point by halving the remaining distance.

    Each level integrates the next half of what is left; the walk stops once a
    piece contributes less than `tolerance`.

    Returns:
        Integral over [start, singular) or None when the pieces do not shrink
        below `tolerance` within `levels` halvings or evaluation fails
    """
    total = 0.0
    left = start
    for level in range(1, levels + 1):
        right = singular + (start - singular) * 0.5 ** level
        try:
            piece = simpson_segment(func, left, right)
        except ThermoDuetError:
            logger.debug("refinement level %d hit the singular window", level)
            return None
        if not np.isfinite(piece):
            return None
        total += piece
        if abs(piece) < tolerance:
            return total
        left = right
    return None


def interval_integral(
    func: Callable[[float], float],
    a: float,
    b: float,
    a_missing: bool,
    b_missing: bool,
    tolerance: float,
    levels: int = REFINEMENT_LEVELS
) -> Optional[float]:
    """Integral over [a, b] when either endpoint cannot be evaluated."""
    mid = 0.5 * (a + b)
    if a_missing:
        part = approach_singularity(func, mid, a, tolerance, levels)
        left = None if part is None else -part
    else:
        left = simpson_segment(func, a, mid)
    if b_missing:
        right = approach_singularity(func, mid, b, tolerance, levels)
    else:
        right = simpson_segment(func, mid, b)
    if left is None or right is None:
        return None
    return left + right


def cumulative_integral(
    values: np.ndarray,
    grid: np.ndarray,
    integrand: Optional[Callable[[float], float]] = None,
    tolerance: float = 0.0,
    levels: int = REFINEMENT_LEVELS
) -> np.ndarray:
    """
    Running integral of sampled values, starting at zero.

    Runs of finite samples are integrated with composite Simpson (trapezoid
    for a run of two points). Intervals touching a missing (NaN) sample are
    integrated through `integrand` toward the missing point; when that fails
    the running integral is NaN from there on.

    Args:
        values: Integrand samples on the grid (NaN marks missing samples)
        grid: Uniform time grid
        integrand: Callable for refinement; without it gaps propagate
        tolerance: Convergence threshold of the singular approach
        levels: Maximum number of halvings toward a missing sample

    Returns:
        Array of cumulative integrals, same length as grid
    """
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    check_uniform_grid(grid)
    if values.shape != grid.shape:
        raise ParameterError("values and grid must have the same length")

    finite = np.isfinite(values)
    if finite.all():
        return cumulative_simpson(values, x=grid, initial=0.0)

    increments = np.full(grid.size - 1, np.nan)
    i = 0
    n = grid.size
    while i < n:
        if not finite[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and finite[j + 1]:
            j += 1
        if j - i >= 2:
            run = slice(i, j + 1)
            cum = cumulative_simpson(values[run], x=grid[run], initial=0.0)
            increments[i:j] = np.diff(cum)
        elif j - i == 1:
            increments[i] = 0.5 * (values[i] + values[j]) * (grid[j] - grid[i])
        i = j + 1

    for k in np.flatnonzero(~(finite[:-1] & finite[1:])):
        if integrand is None:
            continue
        piece = interval_integral(
            integrand, grid[k], grid[k + 1],
            a_missing=not finite[k], b_missing=not finite[k + 1],
            tolerance=tolerance, levels=levels
        )
        if piece is None:
            logger.warning("refinement failed on [%.6g, %.6g]; integral flagged from there on",
                           grid[k], grid[k + 1])
        else:
            increments[k] = piece

    return np.concatenate([[0.0], np.cumsum(increments)])
