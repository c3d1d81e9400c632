"""Dyadic fractional maximal operators with respect to a weighted measure."""
from __future__ import annotations

import numpy as np

from . import _kernels
from .functions import GridFunction, Weight, _measure_weight
from .grids import Grid
from .treeops import level_tables, paint_max, working_cell_measure, working_res


def dyadic_maximal(f: GridFunction, u: Weight | None = None, alpha: float = 0.0,
                   grid: Grid | None = None) -> GridFunction:
    """Cellwise sup over grid cubes Q containing x of
        u(Q)^(-(1 - alpha/n)) * integral over Q of |f| du,
    computed in one coarse-to-fine sweep carrying the running maximum.

    `grid` defaults to the grid f lives on; cells covered by no cube of a
    shifted grid get 0.
    """
    grid = f.grid if grid is None else grid
    n = grid.n
    if not 0 <= alpha < n:
        raise ValueError(f"alpha must lie in [0, {n}), got {alpha}")
    u = _measure_weight(f, u)
    fa, ua = abs(f).aligned_with(u)
    if not grid.is_standard:
        fa, ua = fa.refine(), ua.refine()
    cm = working_cell_measure(grid)
    fu = level_tables(grid, fa.values * ua.values, "sum")
    uu = level_tables(grid, ua.values, "sum")
    exponent = alpha / n - 1.0

    if grid.is_standard and n == 1:
        levels = [fu[k] * cm * (uu[k] * cm) ** exponent for k in range(grid.L + 1)]
        widths = [1 << (grid.L - k) for k in range(grid.L + 1)]
        out = np.zeros(working_res(grid))
        _kernels.maximal_paint(levels, widths, out)
        return GridFunction(grid, out)

    tables = [None] * (grid.L + 1)
    for k in range(grid.L + 1):
        if fu[k].size:
            tables[k] = fu[k] * cm * (uu[k] * cm) ** exponent
    return GridFunction(grid, paint_max(grid, tables, fill=0.0))
