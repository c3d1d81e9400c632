"""Vectorized whole-grid reductions over the cube tree (or forest).

All routines work on the grid's *working resolution*: the standard 2^L cells
per axis for an unshifted grid, the thirds refinement (3 * 2^L per axis) for a
shifted one, where every cube is an axis-aligned block of cells.
"""
from __future__ import annotations

import numpy as np

from .grids import Grid

_OPS = {"sum": np.add, "min": np.minimum, "max": np.maximum}


def working_res(grid: Grid) -> int:
    return grid.cells_per_axis if grid.is_standard else grid.refined_per_axis


def working_cell_measure(grid: Grid) -> float:
    return grid.cell_measure if grid.is_standard else grid.refined_cell_measure


def _fold_axis(arr: np.ndarray, axis: int, start: int, count: int, width: int, op) -> np.ndarray:
    """Reduce `count` consecutive groups of `width` entries along `axis`,
    beginning at offset `start`."""
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(start, start + count * width)
    window = arr[tuple(sl)]
    shape = list(window.shape)
    shape[axis : axis + 1] = [count, width]
    return op.reduce(window.reshape(shape), axis=axis + 1)


def level_tables(grid: Grid, cells: np.ndarray, op: str = "sum") -> list[np.ndarray]:
    """Per-level reductions of cell values over every cube of the grid.

    `cells` is the flat value array at the working resolution.  Returns
    `tables` with tables[k][m - lo] = reduction over cube (k, m); levels with
    no in-domain cubes get an empty array.
    """
    ufunc = _OPS[op]
    res = working_res(grid)
    nd = np.asarray(cells, dtype=float).reshape((res,) * grid.n)
    tables: list = [None] * (grid.L + 1)

    # base level L
    if grid.is_standard:
        base = nd
    else:
        base = nd
        eps = grid._eps(grid.L)
        for axis, ((lo, hi), a) in enumerate(zip(grid.index_bounds(grid.L), grid.shift)):
            count = hi - lo + 1
            start = 3 * lo + eps * a
            base = _fold_axis(base, axis, start, count, 3, ufunc)
    tables[grid.L] = base

    # fold children pairs upward
    for k in range(grid.L - 1, -1, -1):
        child = tables[k + 1]
        eps = grid._eps(k)
        cur = child
        for axis, ((lo, hi), (clo, _chi), a) in enumerate(
            zip(grid.index_bounds(k), grid.index_bounds(k + 1), grid.shift)
        ):
            count = hi - lo + 1
            if count <= 0:
                cur = None
                break
            start = 2 * lo + eps * a - clo
            cur = _fold_axis(cur, axis, start, count, 2, ufunc)
        tables[k] = cur if cur is not None else np.empty((0,) * grid.n)
    return tables


def broadcast_level(grid: Grid, level: int, table: np.ndarray) -> tuple[np.ndarray, tuple[slice, ...]]:
    """Expand a level table to cell resolution.  Returns (block, region) where
    `region` are the per-axis cell slices the block covers at working
    resolution (shifted grids do not cover the whole domain)."""
    if grid.is_standard:
        width = 1 << (grid.L - level)
        block = table
        for axis in range(grid.n):
            block = np.repeat(block, width, axis=axis)
        return block, (slice(None),) * grid.n
    width = grid.thirds_width(level)
    eps = grid._eps(level)
    region = []
    for (lo, hi), a in zip(grid.index_bounds(level), grid.shift):
        start = (3 * lo + eps * a) * (1 << (grid.L - level))
        region.append(slice(start, start + (hi - lo + 1) * width))
    block = table
    for axis in range(grid.n):
        block = np.repeat(block, width, axis=axis)
    return block, tuple(region)


def paint_max(grid: Grid, level_values: list[np.ndarray], fill: float = 0.0) -> np.ndarray:
    """Cellwise max over all cubes containing the cell of per-cube values.

    `level_values[k]` is a table as produced by `level_tables`.  Cells covered
    by no cube keep `fill`.  Returns the flat array at working resolution.
    """
    res = working_res(grid)
    out = np.full((res,) * grid.n, fill, dtype=float)
    for k, table in enumerate(level_values):
        if table is None or table.size == 0:
            continue
        block, region = broadcast_level(grid, k, table)
        np.maximum(out[region], block, out=out[region])
    return out.ravel()


def suffix_chain_max(grid: Grid, level_values: list[np.ndarray]) -> list[np.ndarray]:
    """M[k] = cellwise max of per-cube values over the chain of cubes that
    contain the cell at levels k..L (flat arrays at working resolution).

    Cells not covered at level k get -inf in M[k]."""
    res = working_res(grid)
    out: list[np.ndarray] = [None] * (grid.L + 1)
    prev = np.full((res,) * grid.n, -np.inf)
    for k in range(grid.L, -1, -1):
        cur = np.full((res,) * grid.n, -np.inf)
        table = level_values[k]
        if table is not None and table.size:
            block, region = broadcast_level(grid, k, table)
            cur[region] = block
        np.maximum(cur, prev, out=cur)
        out[k] = cur.ravel()
        prev = cur
    return out
