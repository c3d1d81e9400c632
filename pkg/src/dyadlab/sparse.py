"""Sparse cube families, their validation and stopping-time construction, and
the fractional sparse operator / bilinear form / multiplier composition.

E_Q sets are kept as boolean masks at the thirds resolution (3*2^L per axis),
on which every cube of every shifted lattice is an axis-aligned cell block, so
set algebra and measures are exact integer bookkeeping.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exponents import ExponentTuple, conjugate
from .functions import GridFunction, Weight, local_average
from .grids import Cube, Grid, GridMismatchError


@dataclass(frozen=True)
class SparseMember:
    cube: Cube
    e_mask: np.ndarray  # boolean, flat, thirds resolution

    @property
    def e_count(self) -> int:
        return int(self.e_mask.sum())


@dataclass(frozen=True)
class SparseFamily:
    grid: Grid
    members: list[SparseMember]
    eta: float | Fraction

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def cubes(self) -> list[Cube]:
        return [m.cube for m in self.members]

    def measured_eta(self) -> Fraction:
        """min over members of |E_Q| / |Q| (exact)."""
        best = Fraction(1)
        for m in self.members:
            best = min(best, Fraction(m.e_count, _cube_refined_count(m.cube)))
        return best


def _cube_refined_count(cube: Cube) -> int:
    return cube.thirds_width ** cube.grid.n


def _refined_mask(grid: Grid, cells) -> np.ndarray:
    """Normalize a cell-set to a thirds-resolution mask.  Accepts a Cube, a
    boolean mask (standard or thirds resolution), or indices (interpreted on
    the standard partition)."""
    rn = grid.refined_per_axis ** grid.n
    if isinstance(cells, Cube):
        mask = np.zeros((grid.refined_per_axis,) * grid.n, dtype=bool)
        mask[cells.slices(grid.refined_per_axis)] = True
        return mask.ravel()
    cells = np.asarray(cells)
    if cells.dtype == bool:
        if cells.size == rn:
            return cells.ravel().copy()
        if cells.size == grid.n_cells:
            nd = cells.reshape((grid.cells_per_axis,) * grid.n)
            for axis in range(grid.n):
                nd = np.repeat(nd, 3, axis=axis)
            return nd.ravel()
        raise GridMismatchError("mask length matches neither partition")
    mask = np.zeros(grid.n_cells, dtype=bool)
    mask[cells.astype(np.int64).ravel()] = True
    return _refined_mask(grid, mask)


def member(grid: Grid, cube: Cube, cells=None) -> SparseMember:
    """Build a member; `cells` defaults to the whole cube."""
    return SparseMember(cube, _refined_mask(grid, cube if cells is None else cells))


def sparse_family(grid: Grid, members, eta) -> SparseFamily:
    """Assemble a family from (cube, cell-set) pairs."""
    built = [member(grid, c, e) for c, e in members]
    return SparseFamily(grid, built, eta)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    message: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


def validate(family: SparseFamily) -> ValidationResult:
    """Check E_Q inside Q, pairwise disjointness of the E_Q, and
    |E_Q| >= eta |Q|, all exactly; reports the first violation."""
    eta = Fraction(family.eta)
    grid = family.grid
    coverage = np.zeros(grid.refined_per_axis ** grid.n, dtype=np.int16)
    for m in family.members:
        cube_mask = _refined_mask(grid, m.cube)
        if np.any(m.e_mask & ~cube_mask):
            return ValidationResult(False, f"E_Q not contained in Q for {m.cube}")
        if eta * _cube_refined_count(m.cube) > m.e_count:
            return ValidationResult(
                False, f"|E_Q| < eta |Q| for {m.cube}: "
                       f"{m.e_count} < {eta} * {_cube_refined_count(m.cube)}")
        coverage += m.e_mask
        if coverage.max() > 1:
            return ValidationResult(False, f"E_Q sets overlap at {m.cube}")
    return ValidationResult(True)


# ---------------------------------------------------------------------------
# stopping-time construction
# ---------------------------------------------------------------------------

def build_stopping_family(f: GridFunction, p0: float, grid: Grid | None = None,
                          ratio: float = 2.0) -> SparseFamily:
    """Stopping-time sparse family of f >= 0: from each selected cube Q,
    the stopping children are the maximal subcubes Q' with
    <f>_{p0,Q'} >= ratio * <f>_{p0,Q}; E_Q = Q minus its stopping children.
    The sparsity eta is measured post hoc (exact fraction), never designed.
    """
    if ratio <= 1:
        raise ValueError(f"stopping ratio must exceed 1, got {ratio}")
    if np.any(f.values < 0):
        raise ValueError("build_stopping_family requires f >= 0")
    grid = f.grid if grid is None else grid
    fa = f if grid.is_standard and not f.refined else f.refine()
    res = fa.res
    nd = np.abs(fa.nd) ** p0
    cm = fa.cell_measure

    def p0_average(cube: Cube) -> float:
        total = float(nd[cube.slices(res)].sum() * cm)
        return (total / cube.measure) ** (1.0 / p0)

    roots = [r for r in grid.forest_roots() if p0_average(r) > 0]
    if not roots:
        raise ValueError("degenerate input: f vanishes on every root cube")

    members: list[SparseMember] = []
    stack = list(roots)
    while stack:
        cube = stack.pop()
        threshold = ratio * p0_average(cube)
        stopping: list[Cube] = []
        inner = list(cube.children())
        while inner:
            q = inner.pop()
            if p0_average(q) >= threshold:
                stopping.append(q)
            else:
                inner.extend(q.children())
        e_mask = _refined_mask(grid, cube)
        for q in stopping:
            e_mask &= ~_refined_mask(grid, q)
        members.append(SparseMember(cube, e_mask))
        stack.extend(stopping)

    members.sort(key=lambda m: (m.cube.level, m.cube.index))
    family = SparseFamily(grid, members, Fraction(0))
    eta = family.measured_eta()
    if eta == 0:
        raise ValueError("stopping construction produced an empty E_Q")
    return SparseFamily(grid, members, eta)


# ---------------------------------------------------------------------------
# operators and forms
# ---------------------------------------------------------------------------

def sparse_operator(family: SparseFamily, f: GridFunction, alpha: float = 0.0) -> GridFunction:
    """sum over Q in the family of |Q|^(alpha/n) <f>_Q chi_Q, cellwise.

    The output lives on the standard partition for an unshifted family and on
    the thirds refinement otherwise (where shifted indicators are cellwise
    constant)."""
    grid = family.grid
    n = grid.n
    if not 0 <= alpha < n:
        raise ValueError(f"alpha must lie in [0, {n}), got {alpha}")
    if (grid.n, grid.L) != (f.grid.n, f.grid.L):
        raise GridMismatchError("family and function live on different domains")
    fa = f if grid.is_standard and not f.refined else f.refine()
    res = fa.res
    nd = np.abs(fa.nd)
    cm = fa.cell_measure
    out = np.zeros_like(nd)
    for m in family.members:
        sl = m.cube.slices(res)
        avg = float(nd[sl].sum() * cm) / m.cube.measure
        out[sl] += m.cube.measure ** (alpha / n) * avg
    return GridFunction(f.grid, out.ravel())


def bilinear_form(families, f: GridFunction, g: GridFunction, e: ExponentTuple) -> float:
    """sum over families and cubes of <f>_{p0,Q} <g>_{alpha,q0',Q} |Q|."""
    if isinstance(families, SparseFamily):
        families = [families]
    q0p = conjugate(e.q0)
    total = 0.0
    for family in families:
        for m in family.members:
            q = m.cube
            total += (local_average(f, 0.0, e.p0, q)
                      * local_average(g, e.alpha, q0p, q)
                      * q.measure)
    return total


def multiplier_eval(family: SparseFamily, f: GridFunction, w: Weight,
                    alpha: float = 0.0) -> GridFunction:
    """w * A(w^-1 f) with A the fractional sparse operator of the family."""
    inner = f * w.reciprocal()
    tf = sparse_operator(family, inner, alpha)
    wa, ta = w.aligned_with(tf)
    return GridFunction(f.grid, wa.values * ta.values)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def family_to_csv(family: SparseFamily, fh) -> None:
    """Rows (shift, level, index, resolution, E-cell list); E cells are listed
    at the thirds resolution, `;`-joined."""
    fh.write("shift,level,index,resolution,e_cells\n")
    a = "".join(str(s) for s in family.grid.shift)
    res = family.grid.refined_per_axis
    for m in family.members:
        idx = " ".join(str(i) for i in m.cube.index)
        cells = ";".join(str(i) for i in np.flatnonzero(m.e_mask))
        fh.write(f"{a},{m.cube.level},{idx},{res},{cells}\n")
