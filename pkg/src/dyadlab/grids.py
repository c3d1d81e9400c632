"""Finite-depth dyadic grids, standard and one-third shifted, over the unit cube.

A grid of dimension n and depth L holds every cube of the lattice

    { 2^-k ([0,1)^n + m + (-1)^k a/3) : 0 <= k <= L, m integer }

that is wholly contained in the computational domain [0,1)^n, where the shift
a lies in {0,1,2}^n.  All cube geometry is kept in integer "thirds"
coordinates (units of 2^-L / 3): in those units every cube of every shifted
lattice has integral corners, so containment, ancestry and cell-coverage
queries are exact integer comparisons.  Floating endpoints are never stored.

Functions (see ``dyadlab.functions``) always live on the standard 2^L-per-axis
cell partition of the domain; shifted grids are forests of cubes used as
families for suprema and averages.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence


class GridError(ValueError):
    """Invalid grid parameters or an operation on an incompatible grid."""


class GridMismatchError(GridError):
    """Operation across objects that do not belong to one grid."""


class NoParentError(GridError):
    """The cube is a root of its grid (its lattice parent leaves the domain)."""


class Relation(Enum):
    DISJOINT = "disjoint"
    Q_IN_R = "q_in_r"
    R_IN_Q = "r_in_q"
    EQUAL = "equal"


def _normalize_shift(n: int, shift) -> tuple[int, ...]:
    if shift is None:
        return (0,) * n
    if isinstance(shift, int):
        shift = (shift,) * n
    shift = tuple(int(a) for a in shift)
    if len(shift) != n:
        raise GridError(f"shift must have {n} components, got {shift}")
    if any(a not in (0, 1, 2) for a in shift):
        raise GridError(f"shift components must lie in {{0,1,2}}, got {shift}")
    return shift


@dataclass(frozen=True)
class Grid:
    """All cubes of levels 0..L of one (possibly shifted) dyadic lattice that
    fit inside [0,1)^n."""

    n: int
    L: int
    shift: tuple[int, ...] = None

    def __post_init__(self):
        if int(self.n) < 1:
            raise GridError(f"dimension must be >= 1, got {self.n}")
        if int(self.L) < 0:
            raise GridError(f"depth must be >= 0, got {self.L}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "shift", _normalize_shift(self.n, self.shift))

    # -- cell partition ----------------------------------------------------
    @property
    def cells_per_axis(self) -> int:
        return 1 << self.L

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis ** self.n

    @property
    def refined_per_axis(self) -> int:
        return 3 << self.L

    @property
    def cell_measure(self) -> float:
        return 2.0 ** (-self.n * self.L)

    @property
    def refined_cell_measure(self) -> float:
        return self.cell_measure / 3 ** self.n

    @property
    def is_standard(self) -> bool:
        return all(a == 0 for a in self.shift)

    # -- lattice bookkeeping -------------------------------------------------
    def _eps(self, level: int) -> int:
        return 1 if level % 2 == 0 else -1

    def thirds_width(self, level: int) -> int:
        """Side of a level-`level` cube in thirds units."""
        return 3 << (self.L - level)

    def index_bounds(self, level: int) -> list[tuple[int, int]]:
        """Per-axis inclusive (lo, hi) lattice-index range of in-domain cubes."""
        if not 0 <= level <= self.L:
            raise GridError(f"level must lie in 0..{self.L}, got {level}")
        eps = self._eps(level)
        out = []
        for a in self.shift:
            lo = 1 if eps * a < 0 else 0
            hi = (1 << level) - (2 if eps * a > 0 else 1)
            out.append((lo, hi))
        return out

    def level_shape(self, level: int) -> tuple[int, ...]:
        return tuple(hi - lo + 1 for lo, hi in self.index_bounds(level))

    def level_size(self, level: int) -> int:
        size = 1
        for c in self.level_shape(level):
            size *= c
        return max(size, 0)

    def size(self) -> int:
        return sum(self.level_size(k) for k in range(self.L + 1))

    # -- cube access ---------------------------------------------------------
    def cube(self, level: int, index) -> "Cube":
        if isinstance(index, int):
            index = (index,) * self.n if self.n == 1 else None
            if index is None:
                raise GridError("integer index only allowed for n=1")
        return Cube(self, level, tuple(int(i) for i in index))

    def cubes(self, level: int | None = None) -> Iterator["Cube"]:
        levels = range(self.L + 1) if level is None else [level]
        for k in levels:
            bounds = self.index_bounds(k)
            if any(hi < lo for lo, hi in bounds):
                continue
            for m in itertools.product(*(range(lo, hi + 1) for lo, hi in bounds)):
                yield Cube(self, k, m)

    @property
    def root(self) -> "Cube":
        if not self.is_standard:
            raise GridError("shifted grids are forests and have no single root")
        return Cube(self, 0, (0,) * self.n)

    def forest_roots(self) -> list["Cube"]:
        """Maximal cubes of the grid (cubes whose lattice parent is out of domain)."""
        if self.is_standard:
            return [self.root]
        roots = []
        for k in range(self.L + 1):
            for q in self.cubes(k):
                if k == 0 or not self._parent_in_domain(q):
                    roots.append(q)
        return roots

    def _parent_in_domain(self, q: "Cube") -> bool:
        if q.level == 0:
            return False
        eps_par = self._eps(q.level - 1)
        bounds = self.index_bounds(q.level - 1)
        for m, a, (lo, hi) in zip(q.index, self.shift, bounds):
            mp = (m - eps_par * a) >> 1
            if not lo <= mp <= hi:
                return False
        return True

    def all_shifts(self) -> list["Grid"]:
        """The 3^n grids of the same (n, L) over every shift in {0,1,2}^n."""
        return [Grid(self.n, self.L, a)
                for a in itertools.product((0, 1, 2), repeat=self.n)]

    # -- serialization ---------------------------------------------------------
    def to_config(self) -> dict:
        return {"n": self.n, "L": self.L, "a": list(self.shift)}

    @classmethod
    def from_config(cls, cfg: dict) -> "Grid":
        return cls(int(cfg["n"]), int(cfg["L"]), tuple(cfg.get("a", ())) or None)

    def __repr__(self) -> str:
        a = "".join(str(s) for s in self.shift)
        return f"Grid(n={self.n}, L={self.L}, a={a})"


@dataclass(frozen=True)
class Cube:
    """One cube of a grid, identified by (shift, level, lattice index)."""

    grid: Grid
    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        g = self.grid
        if not 0 <= self.level <= g.L:
            raise GridError(f"level must lie in 0..{g.L}, got {self.level}")
        if len(self.index) != g.n:
            raise GridError(f"index must have {g.n} components, got {self.index}")
        for m, (lo, hi) in zip(self.index, g.index_bounds(self.level)):
            if not lo <= m <= hi:
                raise GridError(
                    f"cube (level={self.level}, m={self.index}) leaves the domain")

    # -- geometry (exact, integer thirds units) -------------------------------
    @property
    def thirds_start(self) -> tuple[int, ...]:
        g = self.grid
        eps = g._eps(self.level)
        scale = 1 << (g.L - self.level)
        return tuple((3 * m + eps * a) * scale for m, a in zip(self.index, g.shift))

    @property
    def thirds_width(self) -> int:
        return self.grid.thirds_width(self.level)

    @property
    def measure(self) -> float:
        return 2.0 ** (-self.grid.n * self.level)

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    def bounds(self) -> list[tuple[float, float]]:
        """Floating endpoints for display; derived, never authoritative."""
        unit = 1.0 / self.grid.refined_per_axis
        w = self.thirds_width
        return [(s * unit, (s + w) * unit) for s in self.thirds_start]

    def slices(self, res_per_axis: int) -> tuple[slice, ...]:
        """Per-axis cell slices of this cube on a partition with `res_per_axis`
        cells per axis (the standard partition or the thirds refinement)."""
        g = self.grid
        if res_per_axis == g.refined_per_axis:
            w = self.thirds_width
            return tuple(slice(s, s + w) for s in self.thirds_start)
        if res_per_axis == g.cells_per_axis:
            w = self.thirds_width
            starts = self.thirds_start
            if any(s % 3 for s in starts):
                raise GridMismatchError(
                    "shifted cube is not aligned with the standard cell partition")
            return tuple(slice(s // 3, (s + w) // 3) for s in starts)
        raise GridMismatchError(f"resolution {res_per_axis} does not match grid {g}")

    @property
    def aligned(self) -> bool:
        """True when the cube is a union of standard cells."""
        return not any(s % 3 for s in self.thirds_start)

    # -- tree structure --------------------------------------------------------
    @property
    def is_leaf(self) -> bool:
        return self.level == self.grid.L

    def children(self) -> list["Cube"]:
        if self.is_leaf:
            return []
        g = self.grid
        eps = g._eps(self.level)
        axes = [(2 * m + eps * a, 2 * m + eps * a + 1)
                for m, a in zip(self.index, g.shift)]
        return [Cube(g, self.level + 1, m) for m in itertools.product(*axes)]

    def parent(self) -> "Cube":
        if self.level == 0:
            raise NoParentError("root cube has no parent")
        g = self.grid
        eps_par = g._eps(self.level - 1)
        idx = tuple((m - eps_par * a) >> 1 for m, a in zip(self.index, g.shift))
        bounds = g.index_bounds(self.level - 1)
        if any(not lo <= m <= hi for m, (lo, hi) in zip(idx, bounds)):
            raise NoParentError("lattice parent leaves the computational domain")
        return Cube(g, self.level - 1, idx)

    def relation(self, other: "Cube") -> Relation:
        """Set relation of two cubes of one grid: disjoint, nested or equal."""
        if self.grid != other.grid:
            raise GridMismatchError(
                "relation is only defined within a single grid "
                f"(got {self.grid} and {other.grid})")
        if self.level == other.level:
            return Relation.EQUAL if self.index == other.index else Relation.DISJOINT
        small, big, tag = ((self, other, Relation.Q_IN_R)
                           if self.level > other.level
                           else (other, self, Relation.R_IN_Q))
        ss, bs = small.thirds_start, big.thirds_start
        sw, bw = small.thirds_width, big.thirds_width
        if all(b <= s and s + sw <= b + bw for s, b in zip(ss, bs)):
            return tag
        return Relation.DISJOINT

    def __repr__(self) -> str:
        a = "".join(str(s) for s in self.grid.shift)
        return f"Cube(a={a}, k={self.level}, m={self.index})"


def relation(q: Cube, r: Cube) -> Relation:
    return q.relation(r)
