"""Piecewise-constant functions and weights on a grid: exact integrals,
localized averages, distribution functions, Lorentz norms and the weak-norm
dual estimate.

A GridFunction *is* its vector of cell values (flat, C order).  Values live on
the standard 2^L-per-axis partition, or on its thirds refinement when the
function came out of an operation involving shifted cubes; the two are
interchangeable via `refine`, which is exact for cellwise-constant data.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grids import Cube, Grid, GridMismatchError
from . import _kernels

INF = math.inf


class FunctionError(ValueError):
    pass


class GridFunction:
    """Real-valued function, constant on the cells of its partition."""

    __slots__ = ("grid", "values", "res")

    def __init__(self, grid: Grid, values):
        values = np.ascontiguousarray(values, dtype=float).ravel()
        if values.size == grid.n_cells:
            res = grid.cells_per_axis
        elif values.size == grid.refined_per_axis ** grid.n:
            res = grid.refined_per_axis
        else:
            raise FunctionError(
                f"value array of length {values.size} matches neither the "
                f"{grid.n_cells}-cell partition nor its thirds refinement")
        if not np.all(np.isfinite(values)):
            raise FunctionError("all cell values must be finite")
        self.grid = grid
        self.values = values
        self.res = res

    # -- representation -------------------------------------------------------
    @property
    def nd(self) -> np.ndarray:
        return self.values.reshape((self.res,) * self.grid.n)

    @property
    def refined(self) -> bool:
        return self.res != self.grid.cells_per_axis

    @property
    def cell_measure(self) -> float:
        return self.grid.refined_cell_measure if self.refined else self.grid.cell_measure

    def refine(self) -> "GridFunction":
        if self.refined:
            return self
        v = self.nd
        for axis in range(self.grid.n):
            v = np.repeat(v, 3, axis=axis)
        return type(self)(self.grid, v.ravel())

    def copy(self) -> "GridFunction":
        return type(self)(self.grid, self.values.copy())

    def _check_domain(self, other: "GridFunction"):
        if (self.grid.n, self.grid.L) != (other.grid.n, other.grid.L):
            raise GridMismatchError(
                f"functions live on different domains: {self.grid} vs {other.grid}")

    def aligned_with(self, other: "GridFunction"):
        """Value arrays of both functions at a common resolution."""
        self._check_domain(other)
        if self.res == other.res:
            return self, other
        a = self.refine() if self.res < other.res else self
        b = other.refine() if other.res < self.res else other
        return a, b

    # -- arithmetic (cellwise) --------------------------------------------------
    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            a, b = self.aligned_with(other)
            return GridFunction(self.grid, op(a.values, b.values))
        return GridFunction(self.grid, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self._binary(other, np.multiply)

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    # -- integration -------------------------------------------------------------
    def integral(self) -> float:
        return float(self.values.sum() * self.cell_measure)

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def cube_values(self, cube: Cube) -> np.ndarray:
        """Flat view of the values on `cube` (self must resolve the cube)."""
        return self.nd[cube.slices(self.res)].ravel()

    def restrict(self, cube: Cube) -> "GridFunction":
        """self * indicator(cube), refining first if the cube is not aligned."""
        f = self if (cube.aligned or self.refined) else self.refine()
        out = np.zeros_like(f.values).reshape((f.res,) * f.grid.n)
        sl = cube.slices(f.res)
        out[sl] = f.nd[sl]
        return GridFunction(f.grid, out.ravel())

    # -- I/O --------------------------------------------------------------------
    def to_csv(self, fh) -> None:
        fh.write("cell,value\n")
        for i, v in enumerate(self.values):
            fh.write(f"{i},{v:.17g}\n")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.grid!r}, res={self.res})"


class Weight(GridFunction):
    """Strictly positive GridFunction, identified with the measure w(E)."""

    def __init__(self, grid: Grid, values):
        super().__init__(grid, values)
        if not np.all(self.values > 0):
            raise FunctionError("weights must be strictly positive on every cell")

    def power(self, exponent: float) -> "Weight":
        return Weight(self.grid, self.values ** exponent)

    def reciprocal(self) -> "Weight":
        return Weight(self.grid, 1.0 / self.values)

    def masses(self, res: int | None = None) -> np.ndarray:
        """Per-cell measure vector w(cell), optionally at a target resolution."""
        f = self
        if res is not None and res != self.res:
            if res != self.grid.refined_per_axis:
                raise GridMismatchError("can only refine, not coarsen, a weight")
            f = self.refine()
        return f.values * f.cell_measure

    def set_mass(self, cells) -> float:
        """w(E) for a cell-set E on the weight's own partition."""
        idx = normalize_cellset(self, cells)
        return float(self.values[idx].sum() * self.cell_measure)


LEBESGUE_SEED = object()  # sentinel: u=None means Lebesgue measure throughout


def lebesgue(grid: Grid) -> Weight:
    return Weight(grid, np.ones(grid.n_cells))


def _measure_weight(f: GridFunction, u: Weight | None) -> Weight:
    if u is None:
        return lebesgue(f.grid)
    f._check_domain(u)
    return u


def normalize_cellset(f: GridFunction, cells) -> np.ndarray:
    """Cell-set -> sorted unique index array on f's partition.  Accepts index
    sequences, boolean masks, or a Cube (meaning the cells it covers)."""
    if isinstance(cells, Cube):
        sl = cells.slices(f.res)
        nd = np.zeros((f.res,) * f.grid.n, dtype=bool)
        nd[sl] = True
        return np.flatnonzero(nd.ravel())
    cells = np.asarray(cells)
    if cells.dtype == bool:
        if cells.size != f.values.size:
            raise FunctionError("boolean mask length does not match the partition")
        return np.flatnonzero(cells.ravel())
    idx = np.unique(cells.astype(np.int64).ravel())
    if idx.size and (idx[0] < 0 or idx[-1] >= f.values.size):
        raise FunctionError("cell index out of range")
    return idx


# ---------------------------------------------------------------------------
# averages and pairings
# ---------------------------------------------------------------------------

def local_average(f: GridFunction, alpha: float, r: float, cube: Cube) -> float:
    """(|Q|^(-1 + alpha/n) * integral over Q of |f|^r)^(1/r); r = inf gives the
    sup of |f| over Q."""
    n = f.grid.n
    if not 0 <= alpha < n:
        raise FunctionError(f"alpha must lie in [0, {n}), got {alpha}")
    g = f if (cube.aligned or f.refined) else f.refine()
    vals = np.abs(g.cube_values(cube))
    if r == INF:
        return float(vals.max())
    if r < 1:
        raise FunctionError(f"integrability exponent must be >= 1, got {r}")
    total = float((vals ** r).sum() * g.cell_measure)
    return (cube.measure ** (-1.0 + alpha / n) * total) ** (1.0 / r)


def pairing(f: GridFunction, g: GridFunction) -> float:
    """<f, g> = integral of f*g dx (exact finite sum)."""
    a, b = f.aligned_with(g)
    return float((a.values * b.values).sum() * a.cell_measure)


def cube_average(f: GridFunction, u: Weight | None, cube: Cube) -> float:
    """u(Q)^-1 * integral over Q of f du."""
    u = _measure_weight(f, u)
    fa, ua = f.aligned_with(u)
    g = fa if (cube.aligned or fa.refined) else fa.refine()
    uu = ua if (cube.aligned or ua.refined) else ua.refine()
    fv, uv = g.cube_values(cube), uu.cube_values(cube)
    den = uv.sum()
    return float((fv * uv).sum() / den)


# ---------------------------------------------------------------------------
# distribution function and Lorentz norms
# ---------------------------------------------------------------------------

def distribution(f: GridFunction, u: Weight | None, y: float) -> float:
    """u({|f| > y}); right-continuous and non-increasing in y."""
    u = _measure_weight(f, u)
    fa, ua = f.aligned_with(u)
    return float(ua.values[np.abs(fa.values) > y].sum() * fa.cell_measure)


def _step_profile(f: GridFunction, u: Weight | None):
    """Distinct positive values v_1 < ... < v_m of |f| and the upper-mass tail
    lam_j = u({|f| >= v_j})."""
    u = _measure_weight(f, u)
    fa, ua = f.aligned_with(u)
    a = np.abs(fa.values)
    masses = ua.values * fa.cell_measure
    vals, inverse = np.unique(a, return_inverse=True)
    mass_at = np.zeros(vals.size)
    np.add.at(mass_at, inverse, masses)
    tail = np.cumsum(mass_at[::-1])[::-1]
    keep = vals > 0
    return vals[keep], tail[keep]


@dataclass(frozen=True)
class LorentzNorms:
    lr: float
    lr1: float
    lr_weak: float


def lorentz_norms(f: GridFunction, u: Weight | None, r: float) -> LorentzNorms:
    """The L^r, L^{r,1} and L^{r,inf} norms of f in the measure u dx.

    L^{r,1} uses the normalization r * integral of lambda(y)^(1/r) dy, summed
    in closed form over the steps of the distribution function."""
    if r < 1 or r == INF:
        raise FunctionError(f"Lorentz exponent must satisfy 1 <= r < inf, got {r}")
    u = _measure_weight(f, u)
    fa, ua = f.aligned_with(u)
    masses = ua.values * fa.cell_measure
    lr = float((np.abs(fa.values) ** r * masses).sum() ** (1.0 / r))
    vals, tail = _step_profile(f, u)
    if vals.size == 0:
        return LorentzNorms(0.0, 0.0, 0.0)
    prev = np.concatenate(([0.0], vals[:-1]))
    lr1 = float(r * ((vals - prev) * tail ** (1.0 / r)).sum())
    lr_weak = float((vals * tail ** (1.0 / r)).max())
    return LorentzNorms(lr, lr1, lr_weak)


def lorentz_l1_rearrangement(f: GridFunction, u: Weight | None, r: float) -> float:
    """L^{r,1} via the decreasing-rearrangement form: integral of
    f*(t) t^(1/r - 1) dt.  Analytically equal to lorentz_norms(...).lr1."""
    if r < 1 or r == INF:
        raise FunctionError(f"Lorentz exponent must satisfy 1 <= r < inf, got {r}")
    vals, tail = _step_profile(f, u)
    if vals.size == 0:
        return 0.0
    nxt = np.concatenate((tail[1:], [0.0]))
    return float(r * (vals * (tail ** (1.0 / r) - nxt ** (1.0 / r))).sum())


# ---------------------------------------------------------------------------
# weak-norm dual estimate
# ---------------------------------------------------------------------------

def level_sets(h: GridFunction) -> list[np.ndarray]:
    """Cell-index sets {|h| >= v} for every distinct positive value v of h."""
    a = np.abs(h.values)
    out = []
    for v in np.unique(a):
        if v > 0:
            out.append(np.flatnonzero(a >= v))
    return out


def weak_dual_estimate(h: GridFunction, w: Weight, q: float, candidates=None) -> float:
    """max over candidate sets G of
        min over G' in G with w^q(G') >= w^q(G)/2 of
            w^q(G')^(-1 + 1/q) * <h, chi_G' w^q>.

    The inner minimum is exact: h is cellwise constant and the objective is
    monotone in the included h-mass, so the optimum takes exactly half the
    w^q-mass of G, filled with the cells of smallest h-value (ties by cell
    index; one fractional boundary cell)."""
    if np.any(h.values < 0):
        raise FunctionError("weak_dual_estimate requires h >= 0")
    h._check_domain(w)
    if candidates is None:
        candidates = level_sets(h)
    if not len(candidates):
        raise FunctionError("candidate list must be nonempty")
    wq = w.power(q)
    ha, wa = h.aligned_with(wq)
    masses = wa.values * ha.cell_measure
    best = 0.0
    for cells in candidates:
        idx = normalize_cellset(ha, cells)
        total = float(masses[idx].sum())
        if total <= 0.0:
            warnings.warn("candidate set with zero w^q mass skipped")
            continue
        order = np.argsort(ha.values[idx], kind="stable")
        sorted_idx = idx[order]
        integral, _, _ = _kernels.weak_dual_prefix(
            np.ascontiguousarray(ha.values[sorted_idx]),
            np.ascontiguousarray(masses[sorted_idx]),
            total / 2.0,
        )
        value = (total / 2.0) ** (-1.0 + 1.0 / q) * integral
        best = max(best, value)
    return best


# ---------------------------------------------------------------------------
# synthesis and the config mini-language
# ---------------------------------------------------------------------------

def constant_function(grid: Grid, c: float) -> GridFunction:
    return GridFunction(grid, np.full(grid.n_cells, float(c)))


def indicator_function(grid: Grid, cells) -> GridFunction:
    v = np.zeros(grid.n_cells)
    probe = GridFunction(grid, v)
    v[normalize_cellset(probe, cells)] = 1.0
    return GridFunction(grid, v)


def _midpoints(grid: Grid) -> np.ndarray:
    side = np.arange(grid.cells_per_axis) * 2.0 ** (-grid.L) + 2.0 ** (-grid.L - 1)
    grids = np.meshgrid(*([side] * grid.n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def power_function(grid: Grid, a: float, center=None) -> GridFunction:
    """|x - center|^a sampled at cell midpoints (center defaults to the origin)."""
    if a <= -1.0 / grid.n:
        raise FunctionError(f"power exponent must exceed -1/n = {-1.0 / grid.n}")
    center = np.zeros(grid.n) if center is None else np.asarray(center, dtype=float)
    dist = np.linalg.norm(_midpoints(grid) - center, axis=-1)
    return GridFunction(grid, dist ** a)


def random_function(grid: Grid, seed: int, dist: str = "lognormal",
                    sigma: float = 1.0, low: float = 0.0, high: float = 1.0) -> GridFunction:
    rng = np.random.default_rng(seed)
    if dist == "lognormal":
        vals = np.exp(sigma * rng.standard_normal(grid.n_cells))
    elif dist == "uniform":
        vals = rng.uniform(low, high, grid.n_cells)
    else:
        raise FunctionError(f"unknown distribution {dist!r}")
    return GridFunction(grid, vals)


def synthesize(grid: Grid, kind: str, **params) -> GridFunction:
    if kind == "constant":
        return constant_function(grid, params["c"])
    if kind == "indicator":
        return indicator_function(grid, params["cells"])
    if kind == "power":
        return power_function(grid, params["a"], params.get("center"))
    if kind == "random":
        return random_function(grid, params["seed"],
                               params.get("dist", "lognormal"),
                               params.get("sigma", 1.0),
                               params.get("low", 0.0), params.get("high", 1.0))
    raise FunctionError(f"unknown function kind {kind!r}")


def _parse_cells(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_function_spec(text: str, grid: Grid) -> GridFunction:
    """Mini-language: const:c | indicator:cells=0;2;5-7 | power:a=0.5[,center=0.25]
    | random:seed=7[,dist=lognormal,sigma=1.0]."""
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "const":
        return constant_function(grid, float(rest))
    kv: dict[str, str] = {}
    for item in rest.split(","):
        if not item.strip():
            continue
        key, _, val = item.partition("=")
        kv[key.strip()] = val.strip()
    if kind == "indicator":
        return indicator_function(grid, _parse_cells(kv["cells"]))
    if kind == "power":
        center = kv.get("center")
        if center is not None:
            center = [float(c) for c in center.split(";")]
            center = center * grid.n if len(center) == 1 else center
        return power_function(grid, float(kv["a"]), center)
    if kind == "random":
        return random_function(grid, int(kv["seed"]), kv.get("dist", "lognormal"),
                               float(kv.get("sigma", 1.0)),
                               float(kv.get("low", 0.0)), float(kv.get("high", 1.0)))
    raise FunctionError(f"cannot parse function spec {text!r}")


def parse_weight_spec(text: str, grid: Grid) -> Weight:
    f = parse_function_spec(text, grid)
    return Weight(grid, f.values)
