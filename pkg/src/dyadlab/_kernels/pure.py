"""NumPy reference implementations of the hot inner-loop kernels.

The compiled extension (``dyadlab._kernels._core``) mirrors these semantics;
sequential accumulations run in the same order so the two backends agree to
rounding.  Scan inputs must be pre-sorted by the caller (stable sort, ties by
cell index) and strictly positive where noted.
"""
from __future__ import annotations

import numpy as np


def min_mass_prefix(values: np.ndarray, measures: np.ndarray, target: float):
    """Minimal mass sum(v * mu) over subsets of total measure `target`,
    filling cells in the given (value-ascending) order with a fractional
    boundary cell.  Returns (mass, nfull, frac)."""
    if target <= 0.0:
        return 0.0, 0, 0.0
    cum_measure = np.cumsum(measures)
    cum_mass = np.cumsum(values * measures)
    k = int(np.searchsorted(cum_measure, target, side="left"))
    if k >= len(values):
        return float(cum_mass[-1]), len(values), 0.0
    before_measure = cum_measure[k - 1] if k else 0.0
    before_mass = cum_mass[k - 1] if k else 0.0
    frac = (target - before_measure) / measures[k]
    return float(before_mass + frac * measures[k] * values[k]), k, float(frac)


def weak_dual_prefix(h_values: np.ndarray, masses: np.ndarray, target: float):
    """Minimal integral sum(h * mass) over subsets of total mass `target`,
    filling cells in the given (h-ascending) order with a fractional boundary
    cell.  Returns (integral, nfull, frac)."""
    if target <= 0.0:
        return 0.0, 0, 0.0
    cum_mass = np.cumsum(masses)
    cum_int = np.cumsum(h_values * masses)
    k = int(np.searchsorted(cum_mass, target, side="left"))
    if k >= len(h_values):
        return float(cum_int[-1]), len(h_values), 0.0
    before_mass = cum_mass[k - 1] if k else 0.0
    before_int = cum_int[k - 1] if k else 0.0
    frac = (target - before_mass) / masses[k]
    return float(before_int + frac * masses[k] * h_values[k]), k, float(frac)


def max_ratio_prefix(values: np.ndarray, measures: np.ndarray, p: float):
    """Maximize |E| / (integral of v over E)^(1/p) along the value-ascending
    fill path: candidates are every full prefix and the interior stationary
    point of each fractional extension.  `values` must be positive.
    Returns (best, nfull, frac)."""
    cum_measure = np.cumsum(measures)
    cum_mass = np.cumsum(values * measures)
    objs = cum_measure * cum_mass ** (-1.0 / p)
    k_best = int(np.argmax(objs))
    best = float(objs[k_best])
    nfull, frac = k_best + 1, 0.0
    if p > 1.0:
        # stationary point of (m + t)/(S + t v)^(1/p) inside segment k+1:
        # t* = (m v - p S) / (v (p - 1))
        m = cum_measure[:-1]
        s = cum_mass[:-1]
        v = values[1:]
        with np.errstate(invalid="ignore"):
            t = (m * v - p * s) / (v * (p - 1.0))
        ok = (t > 0.0) & (t < measures[1:])
        if np.any(ok):
            obj_t = np.where(ok, (m + t) * (s + t * v) ** (-1.0 / p), -np.inf)
            j = int(np.argmax(obj_t))
            if obj_t[j] > best:
                best = float(obj_t[j])
                nfull, frac = j + 1, float(t[j] / measures[j + 1])
    return best, nfull, frac


def maximal_paint(levels: list, widths: list, out: np.ndarray) -> np.ndarray:
    """Cellwise max over a standard 1-D cube tree: levels[k] holds the per-cube
    values at level k, each covering `widths[k]` consecutive cells."""
    for table, width in zip(levels, widths):
        np.maximum(out, np.repeat(table, width), out=out)
    return out
