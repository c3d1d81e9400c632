"""Weighted dyadic Calderon-Zygmund decomposition.

One operation serves both reference measures used in practice: an arbitrary
strictly positive weight u (set u = w^q for the weighted version, u = 1 for
Lebesgue).  The decomposition is defined on the standard grid only: the
level-L cubes of a truncated shifted lattice do not cover the whole domain,
so the good-part sup bound has no proof there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functions import GridFunction, Weight, _measure_weight
from .grids import Cube, Grid, GridError


class RootExceedsThreshold(GridError):
    """The root average already exceeds the threshold; the maximal-cube family
    would need cubes above the root, so the decomposition degenerates."""

    def __init__(self, root_average: float, lam: float):
        super().__init__(
            f"root average {root_average} exceeds the threshold {lam}")
        self.root_average = root_average
        self.lam = lam


@dataclass(frozen=True)
class CZDecomposition:
    lam: float
    cubes: list[Cube]            # the maximal-cube family, ordered (level, index)
    good: GridFunction
    bad: GridFunction
    omega: np.ndarray            # boolean cell mask of the union of the family
    averages: list[float]        # u-average of h over each family cube

    @property
    def is_trivial(self) -> bool:
        return not self.cubes


def decompose(h: GridFunction, u: Weight | None, lam: float,
              grid: Grid | None = None) -> CZDecomposition:
    """Split h >= 0 at threshold lam: the family P collects the maximal grid
    cubes whose u-average of h exceeds lam; on each of them the good part is
    that average, elsewhere it is h itself; bad = h - good.

    Raises RootExceedsThreshold when even the root average exceeds lam.  An
    empty family (no cube exceeds) gives good = h, bad = 0.
    """
    if lam <= 0:
        raise ValueError(f"threshold must be positive, got {lam}")
    grid = h.grid if grid is None else grid
    if not grid.is_standard:
        raise GridError("the decomposition is defined on the standard grid only")
    if np.any(h.values < 0):
        raise ValueError("decompose requires h >= 0")
    u = _measure_weight(h, u)
    ha, ua = h.aligned_with(u)
    res = ha.res
    nd_h, nd_u = ha.nd, ua.nd

    def average(cube: Cube) -> float:
        sl = cube.slices(res)
        return float((nd_h[sl] * nd_u[sl]).sum() / nd_u[sl].sum())

    root = grid.root
    root_avg = average(root)
    if root_avg > lam:
        raise RootExceedsThreshold(root_avg, lam)

    family: list[Cube] = []
    averages: list[float] = []
    stack = [root]
    while stack:
        cube = stack.pop()
        for child in cube.children():
            avg = average(child)
            if avg > lam:
                family.append(child)
                averages.append(avg)
            else:
                stack.append(child)
    order = sorted(range(len(family)), key=lambda i: (family[i].level, family[i].index))
    family = [family[i] for i in order]
    averages = [averages[i] for i in order]

    good = nd_h.copy()
    omega = np.zeros_like(good, dtype=bool)
    for cube, avg in zip(family, averages):
        sl = cube.slices(res)
        good[sl] = avg
        omega[sl] = True
    g = GridFunction(grid, good.ravel())
    b = GridFunction(grid, (nd_h - good).ravel())
    return CZDecomposition(lam, family, g, b, omega.ravel(), averages)
