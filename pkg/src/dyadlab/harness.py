"""Turns the quantitative theorems into executable checks: assembles each
theorem's constant from weight characteristics, measures the empirical
operator quantity on trial inputs, and reports ratios, scaling slopes and
extremal searches.

Empirical norms are maxima over finitely many trials, hence lower bounds of
the true operator norms; sharpness evidence is one-sided by construction.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import (ConstantReport, ap_constant, ar_pq_constant,
                        doubling_constant, fujii_wilson, rh_constant)
from .exponents import INF, ExponentError, ExponentTuple, conjugate
from .functions import (GridFunction, Weight, indicator_function, lorentz_norms)
from .grids import Grid
from .sparse import SparseFamily, sparse_operator, multiplier_eval

THEOREMS = ("thm1.1", "thm1.3", "thma", "prop2.7")


@dataclass(frozen=True)
class TheoremBound:
    theorem: str                  # ThmA | Thm1.1 | Thm1.3-finite | Thm1.3-infinite | Prop2.7
    exponents: ExponentTuple
    constants: dict
    value: float
    theta: float | None = None
    eta: float | None = None

    def __repr__(self) -> str:
        return f"TheoremBound({self.theorem}, value={self.value:.6g})"


@dataclass(frozen=True)
class RatioReport:
    empirical: float
    bound: TheoremBound
    ratio: float
    witness: dict
    trials: int
    seed: int | None = None


def theorem_theta(e: ExponentTuple) -> float:
    """The exponent of the strong-type bound: max of the two displayed terms."""
    if e.p <= e.p0:
        raise ExponentError("the strong-type exponent needs p > p0")
    s = 1.0 if e.q0 == INF else conjugate(e.q0 / e.q)
    q0p = e.q0_prime
    first = s * (1.0 - e.alpha / e.n) / q0p
    second = (1.0 / e.p0 - e.alpha / (e.n * q0p)) / (e.q * (1.0 / e.p0 - 1.0 / e.p))
    return max(first, second)


def theoretical_bound(theorem: str, e: ExponentTuple, w: Weight,
                      eta: float = 0.5, grids=None) -> TheoremBound:
    """Assemble the constant of one theorem from the weight characteristics.

    All characteristic suprema range over `grids` (default: every shift of the
    weight's grid, so that per-cube inequalities hold family-wide)."""
    theorem = theorem.lower()
    if grids is None:
        grids = w.grid.all_shifts()
    s = 1.0 if e.q0 == INF else conjugate(e.q0 / e.q)
    wq = w.power(e.q)

    if theorem == "thm1.1":
        if not 0 < eta <= 1:
            raise ValueError(f"eta must lie in (0,1], got {eta}")
        big_p, big_q = e.p / e.p0, e.q / e.p0
        alpha_t = e.n * (1.0 / big_p - 1.0 / big_q)
        c_ar = ar_pq_constant(w.power(e.p0), big_p, big_q, alpha_t, grids)
        c_rh = rh_constant(wq, s, grids)
        d_eta = doubling_constant(wq, eta, grids)
        d_2n = doubling_constant(wq, 2.0 ** -e.n, grids)
        value = (c_ar.value ** (1.0 / e.p0)
                 * c_rh.value ** (s + 1.0 / e.q)
                 * d_eta.value * d_2n.value ** (1.0 / e.q))
        consts = {"ar_pq": c_ar.value, "rh": c_rh.value,
                  "d_eta": d_eta.value, "d_2n": d_2n.value}
        return TheoremBound("Thm1.1", e, consts, value, eta=eta)

    if theorem == "thm1.3":
        r_a = (1.0 / e.p0 - 1.0 / e.p) * e.q + 1.0
        c_a = ap_constant(wq, r_a, grids)
        if e.q0 == INF:
            c_fw = fujii_wilson(wq, grids)
            value = c_a.value ** (1.0 / e.q) * c_fw.value
            consts = {"ap": c_a.value, "a_inf": c_fw.value, "ap_index": r_a}
            return TheoremBound("Thm1.3-infinite", e, consts, value)
        c_rh = rh_constant(wq, s, grids)
        value = c_a.value ** (1.0 / e.q) * c_rh.value ** (s + 2.0 / e.q)
        consts = {"ap": c_a.value, "rh": c_rh.value, "ap_index": r_a}
        return TheoremBound("Thm1.3-finite", e, consts, value)

    if theorem == "thma":
        theta = theorem_theta(e)
        r_a = (1.0 / e.p0 - 1.0 / e.p) * e.q + 1.0
        c_a = ap_constant(wq, r_a, grids)
        c_rh = rh_constant(wq, s, grids)
        value = (c_a.value * c_rh.value) ** theta
        consts = {"ap": c_a.value, "rh": c_rh.value, "ap_index": r_a}
        return TheoremBound("ThmA", e, consts, value, theta=theta)

    if theorem == "prop2.7":
        a_eff = e.n * (1.0 / e.p - 1.0 / e.q)
        if e.p <= 1 or (a_eff > 0 and e.p > e.n / a_eff):
            raise ExponentError(
                f"the maximal bound needs 1 < p <= n/alpha: p={e.p}, alpha={a_eff}")
        value = (1.0 + e.p_prime / e.q) ** (1.0 - a_eff / e.n)
        return TheoremBound("Prop2.7", e, {"a_eff": a_eff}, value)

    raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


# ---------------------------------------------------------------------------
# empirical ratios
# ---------------------------------------------------------------------------

def _max_over(items, fn, jobs: int = 1):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            vals = list(pool.map(fn, items))
    else:
        vals = [fn(x) for x in items]
    best = int(np.argmax(vals)) if vals else -1
    return (vals[best] if vals else 0.0), best, vals


def restricted_weak_ratio(family: SparseFamily, w: Weight, e: ExponentTuple,
                          candidates, bound: TheoremBound | None = None,
                          grids=None, seed: int | None = None, jobs: int = 1) -> RatioReport:
    """Empirical L^{p,1}(w^p) -> L^{q,inf}(w^q) ratio of the sparse operator
    on characteristic functions, against the restricted weak-type bound.

    The denominator is the closed form ||chi_F||_{L^{p,1}(w^p)} = p w^p(F)^(1/p).
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidate list must be nonempty")
    if bound is None:
        bound = theoretical_bound("thm1.1", e, w, float(family.measured_eta()), grids)
    wp, wq = w.power(e.p), w.power(e.q)

    def one(cells) -> float:
        chi = indicator_function(w.grid, cells)
        if not chi.values.any():
            raise ValueError("candidate F must be a nonempty cell-set")
        tf = sparse_operator(family, chi, e.alpha)
        num = lorentz_norms(tf, wq, e.q).lr_weak
        den = e.p * wp.set_mass(cells) ** (1.0 / e.p)
        return num / den

    empirical, best, _ = _max_over(candidates, one, jobs)
    witness = {"cells": np.asarray(candidates[best]).tolist()}
    return RatioReport(empirical, bound, empirical / bound.value, witness,
                       len(candidates), seed)


def multiplier_weak_ratio(family: SparseFamily, w: Weight, e: ExponentTuple,
                          trials, bound: TheoremBound | None = None,
                          grids=None, seed: int | None = None, jobs: int = 1) -> RatioReport:
    """Empirical unweighted L^p -> L^{q,inf} ratio of f -> w T(w^-1 f)."""
    trials = list(trials)
    if not trials:
        raise ValueError("trial list must be nonempty")
    if bound is None:
        bound = theoretical_bound("thm1.3", e, w, grids=grids)

    def one(f: GridFunction) -> float:
        den = lorentz_norms(f, None, e.p).lr
        if den == 0.0:
            return 0.0
        tf = multiplier_eval(family, f, w, e.alpha)
        return lorentz_norms(tf, None, e.q).lr_weak / den

    empirical, best, _ = _max_over(trials, one, jobs)
    return RatioReport(empirical, bound, empirical / bound.value,
                       {"trial": best}, len(trials), seed)


def strong_ratio(family: SparseFamily, w: Weight, e: ExponentTuple,
                 trials, bound: TheoremBound | None = None,
                 grids=None, seed: int | None = None, jobs: int = 1) -> RatioReport:
    """Empirical L^p(w^p) -> L^q(w^q) ratio of the sparse operator against the
    strong-type bound."""
    trials = list(trials)
    if not trials:
        raise ValueError("trial list must be nonempty")
    if bound is None:
        bound = theoretical_bound("thma", e, w, grids=grids)
    wp, wq = w.power(e.p), w.power(e.q)

    def one(f: GridFunction) -> float:
        den = lorentz_norms(f, wp, e.p).lr
        if den == 0.0:
            return 0.0
        tf = sparse_operator(family, f, e.alpha)
        return lorentz_norms(tf, wq, e.q).lr / den

    empirical, best, _ = _max_over(trials, one, jobs)
    return RatioReport(empirical, bound, empirical / bound.value,
                       {"trial": best}, len(trials), seed)


# ---------------------------------------------------------------------------
# scaling slopes and extremal search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeReport:
    slope: float
    r_squared: float
    count: int


def scaling_slope(reports) -> SlopeReport:
    """Least-squares slope of log(empirical) against log(theoretical bound)
    across a parameterized family; slope <= 1 + tol supports the theorem's
    exponent, slope near 1 suggests sharpness."""
    reports = list(reports)
    if len(reports) < 4:
        raise ValueError(f"need at least 4 family members, got {len(reports)}")
    bounds = np.array([r.bound.value for r in reports])
    emps = np.array([r.empirical for r in reports])
    if np.any(np.diff(bounds) <= 0):
        raise ValueError("theoretical bounds must be strictly increasing")
    if np.any(emps <= 0):
        raise ValueError("empirical values must be positive for a log fit")
    x, y = np.log(bounds), np.log(emps)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return SlopeReport(float(slope), r2, len(reports))


@dataclass(frozen=True)
class SearchReport:
    initial: float
    best: float
    accepted: int
    weight: Weight
    cells: np.ndarray | None
    iterations: int
    seed: int


def extremal_search(objective, w0: Weight, cells0=None, seed: int = 0,
                    iterations: int = 100, weight_step: float = 0.5,
                    move_set=("weight", "cells")) -> SearchReport:
    """Randomized hill climb on `objective(weight, cells)`: cellwise
    multiplicative weight perturbations and single-cell toggles of the input
    set.  Deterministic given the seed; the best value never decreases."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = np.random.default_rng(seed)
    w = w0.values.copy()
    cells = None if cells0 is None else np.asarray(cells0, dtype=bool).copy()
    moves = [m for m in move_set if m != "cells" or cells is not None]
    if not moves:
        raise ValueError("move set is empty (cell moves need an initial cell-set)")
    best = float(objective(Weight(w0.grid, w),
                           None if cells is None else np.flatnonzero(cells)))
    initial = best
    accepted = 0
    for _ in range(iterations):
        move = moves[rng.integers(len(moves))]
        if move == "weight":
            j = int(rng.integers(w.size))
            old = w[j]
            w[j] = old * math.exp(weight_step * rng.standard_normal())
            trial_cells = cells
        else:
            j = int(rng.integers(cells.size))
            trial_cells = cells.copy()
            trial_cells[j] = ~trial_cells[j]
            if not trial_cells.any():
                continue
            old = None
        val = float(objective(Weight(w0.grid, w),
                              None if trial_cells is None else np.flatnonzero(trial_cells)))
        if val > best:
            best = val
            accepted += 1
            if move == "cells":
                cells = trial_cells
        else:
            if move == "weight":
                w[j] = old
    return SearchReport(initial, best, accepted, Weight(w0.grid, w),
                        None if cells is None else np.flatnonzero(cells),
                        iterations, seed)


# ---------------------------------------------------------------------------
# trial generators
# ---------------------------------------------------------------------------

def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Deterministic independent streams split from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def random_dyadic_union(grid: Grid, rng: np.random.Generator, max_cubes: int = 3) -> np.ndarray:
    """Cell-index set of a random union of standard dyadic cubes."""
    mask = np.zeros((grid.cells_per_axis,) * grid.n, dtype=bool)
    for _ in range(int(rng.integers(1, max_cubes + 1))):
        level = int(rng.integers(0, grid.L + 1))
        index = tuple(int(rng.integers(0, 1 << level)) for _ in range(grid.n))
        mask[grid.cube(level, index).slices(grid.cells_per_axis)] = True
    return np.flatnonzero(mask.ravel())


def lognormal_trials(grid: Grid, seed: int, count: int, sigma: float = 1.0) -> list[GridFunction]:
    return [GridFunction(grid, np.exp(sigma * rng.standard_normal(grid.n_cells)))
            for rng in spawn_rngs(seed, count)]


def random_weight(grid: Grid, rng: np.random.Generator, sigma: float = 1.0) -> Weight:
    return Weight(grid, np.exp(sigma * rng.standard_normal(grid.n_cells)))
