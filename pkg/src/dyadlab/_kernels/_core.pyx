# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels mirroring dyadlab._kernels.pure (same accumulation order)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def min_mass_prefix(double[::1] values, double[::1] measures, double target):
    """Minimal mass over value-ascending fills of total measure `target`."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i
    cdef double cum_measure = 0.0, mass = 0.0, frac
    if target <= 0.0:
        return 0.0, 0, 0.0
    for i in range(n):
        if cum_measure + measures[i] >= target:
            frac = (target - cum_measure) / measures[i]
            return mass + frac * measures[i] * values[i], i, frac
        cum_measure += measures[i]
        mass += values[i] * measures[i]
    return mass, n, 0.0


def weak_dual_prefix(double[::1] h_values, double[::1] masses, double target):
    """Minimal integral over h-ascending fills of total mass `target`."""
    cdef Py_ssize_t n = h_values.shape[0]
    cdef Py_ssize_t i
    cdef double cum_mass = 0.0, integral = 0.0, frac
    if target <= 0.0:
        return 0.0, 0, 0.0
    for i in range(n):
        if cum_mass + masses[i] >= target:
            frac = (target - cum_mass) / masses[i]
            return integral + frac * masses[i] * h_values[i], i, frac
        cum_mass += masses[i]
        integral += h_values[i] * masses[i]
    return integral, n, 0.0


def max_ratio_prefix(double[::1] values, double[::1] measures, double p):
    """Maximize |E| / (integral of v)^{1/p} along the value-ascending fill
    path (full prefixes plus interior stationary extensions)."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i, nfull = 1
    cdef double m = 0.0, s = 0.0, best = -1e300, obj, frac = 0.0
    cdef double v, t, mt, st
    for i in range(n):
        if p > 1.0 and i > 0:
            v = values[i]
            t = (m * v - p * s) / (v * (p - 1.0))
            if 0.0 < t < measures[i]:
                mt = m + t
                st = s + t * v
                obj = mt * st ** (-1.0 / p)
                if obj > best:
                    best = obj
                    nfull = i
                    frac = t / measures[i]
        m += measures[i]
        s += values[i] * measures[i]
        obj = m * s ** (-1.0 / p)
        if obj > best:
            best = obj
            nfull = i + 1
            frac = 0.0
    return best, nfull, frac


def maximal_paint(list levels, list widths, double[::1] out):
    """Cellwise max over a standard 1-D cube tree (levels coarse to fine)."""
    cdef Py_ssize_t k, j, c, width, nq
    cdef double v
    cdef double[::1] table
    for k in range(len(levels)):
        table = levels[k]
        width = widths[k]
        nq = table.shape[0]
        for j in range(nq):
            v = table[j]
            for c in range(j * width, (j + 1) * width):
                if v > out[c]:
                    out[c] = v
    return np.asarray(out)
