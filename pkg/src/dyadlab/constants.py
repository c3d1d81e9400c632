"""Weight characteristics: Muckenhoupt A_p, Fujii-Wilson A_inf, reverse
Hoelder, restricted weak-type A^R_{p,q} (plus its dual-side variant), and the
eta-doubling constant.

Every constant is a supremum over the cubes of one or more grids.  The inner
suprema over measurable subsets E of a cube reduce, by monotone rearrangement
of cellwise-constant data, to sorted-prefix scans with at most one fractional
boundary cell; `method="brute"` switches to exhaustive subset enumeration
(with the fractional cell) for oracle-grade validation on small cubes.

Suprema range over the supplied truncated grids only, which under-estimates
the full-space constants; every report records the grid depth.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exponents import INF, conjugate
from .functions import Weight
from .grids import Cube, Grid
from .treeops import level_tables, suffix_chain_max, working_cell_measure, working_res

_BRUTE_LIMIT = 20


@dataclass(frozen=True)
class ConstantReport:
    name: str
    value: float
    witness: Cube | None
    algorithm: str = "greedy"
    depth: int = 0
    params: dict = field(default_factory=dict)
    witness_set: dict | None = None

    def __repr__(self) -> str:
        return f"ConstantReport({self.name}={self.value:.6g}, witness={self.witness})"


def _as_grids(w: Weight, grids) -> list[Grid]:
    if grids is None:
        return [w.grid]
    if isinstance(grids, Grid):
        return [grids]
    return list(grids)


def _values_for(w: Weight, grid: Grid) -> np.ndarray:
    f = w if grid.is_standard else w.refine()
    return f.values


def _check_pq_slice(n: int, p: float, q: float, alpha: float) -> None:
    if not 1 <= p <= q or q == INF:
        raise ValueError(f"violated 1 <= p <= q < inf: p={p}, q={q}")
    if not 0 <= alpha < n:
        raise ValueError(f"violated 0 <= alpha < n: alpha={alpha}")
    if not math.isclose(1.0 / p - 1.0 / q, alpha / n, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(
            f"violated 1/p - 1/q = alpha/n: 1/{p} - 1/{q} != {alpha}/{n}")


# ---------------------------------------------------------------------------
# A_p and reverse Hoelder (vectorized per level)
# ---------------------------------------------------------------------------

def ap_constant(w: Weight, p: float, grids=None) -> ConstantReport:
    """sup_Q <w>_Q <w^(1-p')>_Q^(p-1); for p = 1, sup_Q <w>_Q / essinf_Q w."""
    if p < 1:
        raise ValueError(f"A_p requires p >= 1, got {p}")
    grids = _as_grids(w, grids)
    best, witness = -np.inf, None
    for grid in grids:
        vals = _values_for(w, grid)
        cm = working_cell_measure(grid)
        tw = level_tables(grid, vals, "sum")
        if p == 1:
            tother = level_tables(grid, vals, "min")
        else:
            tother = level_tables(grid, vals ** (1.0 - conjugate(p)), "sum")
        for k in range(grid.L + 1):
            if tw[k].size == 0:
                continue
            meas = 2.0 ** (-grid.n * k)
            avg_w = tw[k] * (cm / meas)
            if p == 1:
                obj = avg_w / tother[k]
            else:
                obj = avg_w * (tother[k] * (cm / meas)) ** (p - 1.0)
            j = int(np.argmax(obj))
            if obj.ravel()[j] > best:
                best = float(obj.ravel()[j])
                witness = _cube_at(grid, k, j, tw[k].shape)
    return ConstantReport("A_p", best, witness, "greedy", grids[0].L, {"p": p})


def rh_constant(w: Weight, s: float, grids=None) -> ConstantReport:
    """sup_Q <w>_{s,Q} / <w>_Q; s = inf uses the sup over cells of Q; s = 1 is
    the A_inf interpretation with constant 1."""
    if s < 1:
        raise ValueError(f"RH_s requires s >= 1, got {s}")
    grids = _as_grids(w, grids)
    if s == 1:
        return ConstantReport("RH_s", 1.0, None, "definition", grids[0].L, {"s": s})
    best, witness = -np.inf, None
    for grid in grids:
        vals = _values_for(w, grid)
        cm = working_cell_measure(grid)
        tw = level_tables(grid, vals, "sum")
        tnum = level_tables(grid, vals ** s, "sum") if s != INF else level_tables(grid, vals, "max")
        for k in range(grid.L + 1):
            if tw[k].size == 0:
                continue
            meas = 2.0 ** (-grid.n * k)
            avg_w = tw[k] * (cm / meas)
            if s == INF:
                num = tnum[k]
            else:
                num = (tnum[k] * (cm / meas)) ** (1.0 / s)
            obj = num / avg_w
            j = int(np.argmax(obj))
            if obj.ravel()[j] > best:
                best = float(obj.ravel()[j])
                witness = _cube_at(grid, k, j, tw[k].shape)
    return ConstantReport("RH_s", best, witness, "greedy", grids[0].L, {"s": s})


def _cube_at(grid: Grid, level: int, flat_j: int, shape) -> Cube:
    offsets = np.unravel_index(flat_j, shape)
    bounds = grid.index_bounds(level)
    return Cube(grid, level, tuple(lo + int(o) for (lo, _), o in zip(bounds, offsets)))


# ---------------------------------------------------------------------------
# Fujii-Wilson A_inf
# ---------------------------------------------------------------------------

def fujii_wilson(w: Weight, grids=None) -> ConstantReport:
    """sup_Q w(Q)^-1 * integral over Q of M(w chi_Q), with M the dyadic
    maximal operator of the same grid.

    For x in Q the chain maximum over cubes R with x in R, R inside Q equals
    M(w chi_Q)(x) (coarser cubes are dominated by Q itself), so one suffix
    sweep per grid serves every cube at once."""
    grids = _as_grids(w, grids)
    best, witness = -np.inf, None
    for grid in grids:
        vals = _values_for(w, grid)
        cm = working_cell_measure(grid)
        sums = level_tables(grid, vals, "sum")
        avgs = [None] * (grid.L + 1)
        for k in range(grid.L + 1):
            if sums[k].size:
                avgs[k] = sums[k] * (cm / 2.0 ** (-grid.n * k))
        chain = suffix_chain_max(grid, avgs)
        for k in range(grid.L + 1):
            if sums[k].size == 0:
                continue
            integral = level_tables(grid, chain[k], "sum")[k] * cm
            obj = integral / (sums[k] * cm)
            j = int(np.argmax(obj))
            if obj.ravel()[j] > best:
                best = float(obj.ravel()[j])
                witness = _cube_at(grid, k, j, obj.shape)
    return ConstantReport("A_inf", best, witness, "greedy", grids[0].L, {})


# ---------------------------------------------------------------------------
# inner suprema over subsets of one cube
# ---------------------------------------------------------------------------

def _sorted_cube(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    return np.ascontiguousarray(values[order]), order


def _inner_min_mass(values: np.ndarray, cell_measure: float, target: float):
    sv, order = _sorted_cube(values)
    measures = np.full(sv.size, cell_measure)
    mass, nfull, frac = _kernels.min_mass_prefix(sv, measures, target)
    return mass, {"order": order, "nfull": nfull, "frac": frac}


def _inner_max_ratio(values: np.ndarray, cell_measure: float, p: float):
    sv, order = _sorted_cube(values)
    measures = np.full(sv.size, cell_measure)
    best, nfull, frac = _kernels.max_ratio_prefix(sv, measures, p)
    return best, {"order": order, "nfull": nfull, "frac": frac}


def _ratio_obj(m: float, s: float, p: float) -> float:
    return m * s ** (-1.0 / p) if s > 0 else -np.inf


def _inner_max_ratio_brute(values: np.ndarray, cell_measure: float, p: float) -> float:
    """Exhaustive max of |E| / (w^p(E))^(1/p) over cell subsets plus a single
    fractional cell (exact for cellwise-constant data)."""
    nc = values.size
    if nc > _BRUTE_LIMIT:
        raise ValueError(f"brute enumeration limited to {_BRUTE_LIMIT} cells")
    best = -np.inf
    for bits in range(1, 1 << nc):
        idx = [i for i in range(nc) if bits >> i & 1]
        m = len(idx) * cell_measure
        s = float(values[idx].sum() * cell_measure)
        best = max(best, _ratio_obj(m, s, p))
    for bits in range(1 << nc):
        idx = [i for i in range(nc) if bits >> i & 1]
        m0 = len(idx) * cell_measure
        s0 = float(values[idx].sum() * cell_measure)
        for c in range(nc):
            if bits >> c & 1:
                continue
            v = float(values[c])
            if p > 1:
                t = (m0 * v - p * s0) / (v * (p - 1.0))
                if 0 < t < cell_measure:
                    best = max(best, _ratio_obj(m0 + t, s0 + t * v, p))
            # segment endpoints are covered by the pure-subset pass
    return best


def _inner_min_mass_brute(values: np.ndarray, cell_measure: float, target: float) -> float:
    """Exhaustive min of w(E) over subsets of measure exactly `target`
    (subsets plus one fractional cell)."""
    nc = values.size
    if nc > _BRUTE_LIMIT:
        raise ValueError(f"brute enumeration limited to {_BRUTE_LIMIT} cells")
    best = np.inf
    for bits in range(1 << nc):
        idx = [i for i in range(nc) if bits >> i & 1]
        m0 = len(idx) * cell_measure
        s0 = float(values[idx].sum() * cell_measure)
        if m0 >= target:
            if m0 - target <= cell_measure * 1e-12:
                best = min(best, s0)
            continue
        need = target - m0
        if need > cell_measure * (1 + 1e-12):
            continue
        for c in range(nc):
            if bits >> c & 1:
                continue
            frac = min(need / cell_measure, 1.0)
            best = min(best, s0 + frac * cell_measure * float(values[c]))
    return best


# ---------------------------------------------------------------------------
# A^R_{p,q} and friends
# ---------------------------------------------------------------------------

def ar_pq_constant(w: Weight, p: float, q: float, alpha: float,
                   grids=None, method: str = "greedy") -> ConstantReport:
    """sup_Q sup_{E in Q} |E| / |Q|^(1 - alpha/n) * w^q(Q)^(1/q) / w^p(E)^(1/p).

    For fixed Q the maximizer of |E| / w^p(E)^(1/p) is a sublevel set of w
    with at most one fractionally included boundary cell (rearrangement), so
    the inner supremum is a sorted-prefix scan."""
    _check_pq_slice(w.grid.n, p, q, alpha)
    grids = _as_grids(w, grids)
    n = w.grid.n
    wp, wq = w.power(p), w.power(q)
    best, witness, wset = -np.inf, None, None
    for grid in grids:
        vp = _values_for(wp, grid)
        vq = _values_for(wq, grid)
        cm = working_cell_measure(grid)
        res = working_res(grid)
        ndp, ndq = vp.reshape((res,) * n), vq.reshape((res,) * n)
        for cube in grid.cubes():
            sl = cube.slices(res)
            cube_p = ndp[sl].ravel()
            wq_mass = float(ndq[sl].sum() * cm)
            pref = wq_mass ** (1.0 / q) * cube.measure ** (alpha / n - 1.0)
            if method == "brute":
                inner, info = _inner_max_ratio_brute(cube_p, cm, p), None
            else:
                inner, info = _inner_max_ratio(cube_p, cm, p)
            val = pref * inner
            if val > best:
                best, witness, wset = float(val), cube, info
    return ConstantReport("AR_pq", best, witness, method, grids[0].L,
                          {"p": p, "q": q, "alpha": alpha}, wset)


def ar_pq_prime(w: Weight, p: float, q: float, alpha: float, grids=None) -> ConstantReport:
    """sup_Q w^q(Q)^(1/q) * ||chi_Q w^-p||_{L^{p',inf}(w^p)} * |Q|^(alpha/n - 1);
    for p = 1 the weak norm degenerates to the essential sup of w^-p on Q."""
    _check_pq_slice(w.grid.n, p, q, alpha)
    grids = _as_grids(w, grids)
    n = w.grid.n
    pp = conjugate(p)
    exponent = 0.0 if pp == INF else 1.0 / pp
    wp, wq = w.power(p), w.power(q)
    best, witness = -np.inf, None
    for grid in grids:
        vp = _values_for(wp, grid)
        vq = _values_for(wq, grid)
        cm = working_cell_measure(grid)
        res = working_res(grid)
        ndp, ndq = vp.reshape((res,) * n), vq.reshape((res,) * n)
        for cube in grid.cubes():
            sl = cube.slices(res)
            cube_p = ndp[sl].ravel()
            inv = 1.0 / cube_p                      # values of w^-p on the cube
            masses = cube_p * cm                     # w^p cell masses
            order = np.argsort(inv, kind="stable")
            sv, sm = inv[order], masses[order]
            suffix = np.cumsum(sm[::-1])[::-1]       # w^p({w^-p >= v})
            first = np.concatenate(([True], sv[1:] != sv[:-1]))
            weak = float((sv[first] * suffix[first] ** exponent).max())
            wq_mass = float(ndq[sl].sum() * cm)
            val = wq_mass ** (1.0 / q) * weak * cube.measure ** (alpha / n - 1.0)
            if val > best:
                best, witness = float(val), cube
    return ConstantReport("AR_pq_prime", best, witness, "greedy", grids[0].L,
                          {"p": p, "q": q, "alpha": alpha})


def doubling_constant(u: Weight, eta: float, grids=None, method: str = "greedy") -> ConstantReport:
    """sup { u(Q) / u(E) : Q a grid cube, E in Q, |E| >= eta |Q| }, by default
    over all 3^n shifted grids.  The inner supremum fills E with the cells of
    smallest u-value (fractional boundary cell) to measure exactly eta |Q|."""
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if grids is None:
        grids = u.grid.all_shifts()
    grids = _as_grids(u, grids)
    n = u.grid.n
    best, witness, wset = -np.inf, None, None
    for grid in grids:
        vals = _values_for(u, grid)
        cm = working_cell_measure(grid)
        res = working_res(grid)
        nd = vals.reshape((res,) * n)
        for cube in grid.cubes():
            cells = nd[cube.slices(res)].ravel()
            mass = float(cells.sum() * cm)
            target = eta * cube.measure
            if method == "brute":
                least, info = _inner_min_mass_brute(cells, cm, target), None
            else:
                least, info = _inner_min_mass(cells, cm, target)
            val = mass / least
            if val > best:
                best, witness, wset = float(val), cube, info
    return ConstantReport("D_eta", best, witness, method, grids[0].L,
                          {"eta": eta}, wset)


# ---------------------------------------------------------------------------
# re-evaluation of a report at its witness
# ---------------------------------------------------------------------------

def reevaluate(report: ConstantReport, w: Weight) -> float:
    """Recompute the reported objective at the witness cube."""
    cube = report.witness
    if cube is None:
        return report.value
    name, pr = report.name, report.params
    if name == "A_p":
        return _objective_ap(w, cube, pr["p"])
    if name == "RH_s":
        return _objective_rh(w, cube, pr["s"])
    if name == "A_inf":
        return _objective_fw(w, cube)
    if name == "AR_pq":
        return _objective_ar(w, cube, pr["p"], pr["q"], pr["alpha"])
    if name == "AR_pq_prime":
        return _objective_ar_prime(w, cube, pr["p"], pr["q"], pr["alpha"])
    if name == "D_eta":
        return _objective_doubling(w, cube, pr["eta"])
    raise ValueError(f"unknown constant {name!r}")


def _cube_cells(w: Weight, cube: Cube) -> tuple[np.ndarray, float]:
    grid = cube.grid
    f = w if grid.is_standard else w.refine()
    res = working_res(grid)
    return f.nd[cube.slices(res)].ravel(), working_cell_measure(grid)


def _objective_ap(w: Weight, cube: Cube, p: float) -> float:
    cells, cm = _cube_cells(w, cube)
    avg = float(cells.sum() * cm) / cube.measure
    if p == 1:
        return avg / float(cells.min())
    other = float((cells ** (1.0 - conjugate(p))).sum() * cm) / cube.measure
    return avg * other ** (p - 1.0)


def _objective_rh(w: Weight, cube: Cube, s: float) -> float:
    if s == 1:
        return 1.0
    cells, cm = _cube_cells(w, cube)
    avg = float(cells.sum() * cm) / cube.measure
    if s == INF:
        return float(cells.max()) / avg
    num = (float((cells ** s).sum() * cm) / cube.measure) ** (1.0 / s)
    return num / avg


def _objective_fw(w: Weight, cube: Cube) -> float:
    """w(Q)^-1 * integral over Q of the within-Q dyadic maximal of w, by a
    direct chain enumeration on the subtree of the witness cube."""
    grid = cube.grid
    f = w if grid.is_standard else w.refine()
    res = working_res(grid)
    cm = working_cell_measure(grid)
    nd = f.nd
    total = 0.0
    stack = [(cube, -np.inf)]
    while stack:
        q, running = stack.pop()
        avg = float(nd[q.slices(res)].sum() * cm) / q.measure
        running = max(running, avg)
        kids = q.children()
        if not kids:
            count = nd[q.slices(res)].size
            total += running * count * cm
        else:
            for kid in kids:
                stack.append((kid, running))
    mass = float(nd[cube.slices(res)].sum() * cm)
    return total / mass


def _objective_ar(w: Weight, cube: Cube, p: float, q: float, alpha: float) -> float:
    cells, cm = _cube_cells(w, cube)
    inner, _ = _inner_max_ratio(cells ** p, cm, p)
    wq_mass = float((cells ** q).sum() * cm)
    n = w.grid.n
    return wq_mass ** (1.0 / q) * cube.measure ** (alpha / n - 1.0) * inner


def _objective_ar_prime(w: Weight, cube: Cube, p: float, q: float, alpha: float) -> float:
    cells, cm = _cube_cells(w, cube)
    pp = conjugate(p)
    exponent = 0.0 if pp == INF else 1.0 / pp
    vp = cells ** p
    inv = 1.0 / vp
    masses = vp * cm
    order = np.argsort(inv, kind="stable")
    sv, sm = inv[order], masses[order]
    suffix = np.cumsum(sm[::-1])[::-1]
    first = np.concatenate(([True], sv[1:] != sv[:-1]))
    weak = float((sv[first] * suffix[first] ** exponent).max())
    wq_mass = float((cells ** q).sum() * cm)
    n = w.grid.n
    return wq_mass ** (1.0 / q) * weak * cube.measure ** (alpha / n - 1.0)


def _objective_doubling(u: Weight, cube: Cube, eta: float) -> float:
    cells, cm = _cube_cells(u, cube)
    least, _ = _inner_min_mass(cells, cm, eta * cube.measure)
    return float(cells.sum() * cm) / least


# ---------------------------------------------------------------------------
# Reverse-Hoelder self-improvement probe (exploratory; never asserted)
# ---------------------------------------------------------------------------

def self_improvement_probe(w: Weight, s: float | None = None, grids=None,
                           ladder=None, slack: float = 2.0) -> dict:
    """Empirical search for the dimensional constants of the self-improvement
    property of reverse-Hoelder weights.

    Case s > 1: smallest c on the ladder with
        [w]_{RH_v} <= slack * [w]_{RH_s} at v = s + (s-1)/(c s [w]_{RH_s}^s).
    Case s None: largest d with [w]_{RH_v} <= slack at v = 1 + d/[w]_{A_inf}.
    Reported, never asserted.
    """
    ladder = np.geomspace(2.0 ** -10, 2.0 ** 10, 41) if ladder is None else np.asarray(ladder)
    out: dict = {"slack": slack}
    if s is not None:
        if not 1 < s < INF:
            raise ValueError("self-improvement case (1) needs 1 < s < inf")
        base = rh_constant(w, s, grids).value
        out.update({"s": s, "rh_s": base, "case": 1, "c": None})
        for c in ladder:
            v = s + (s - 1.0) / (c * s * base ** s)
            val = rh_constant(w, v, grids).value
            if val <= slack * base:
                out.update({"c": float(c), "v": v, "rh_v": val})
                break
        return out
    ainf = fujii_wilson(w, grids).value
    out.update({"a_inf": ainf, "case": 2, "d": None})
    for d in ladder[::-1]:
        v = 1.0 + d / ainf
        val = rh_constant(w, v, grids).value
        if val <= slack:
            out.update({"d": float(d), "v": v, "rh_v": val})
            break
    return out
