"""Discretized compact fuzzy sets, grey-level maps and their level-set algebra.

A fuzzy set lives on a regular grid laid over a closed axis-aligned box and
takes values in the quantized unit interval {0, 1/L, ..., 1}.  Levels are
stored as integers 0..L in a dense array shaped like the grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Snapping tolerance in index units; keeps exact ties stable under fp noise.
SNAP_EPS = 1e-9

EMPTY = None  # marker returned by grey_threshold when the cut is empty


class GridEscapeError(ValueError):
    """A mapped point left the grid box."""


class NotNormalError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Regular grid of ``dims[a]`` points per axis over a closed box.

    Both faces of the box are grid points, so the spacing along axis ``a`` is
    ``extent[a] / (dims[a] - 1)``.
    """

    dims: tuple[int, ...]
    origin: tuple[float, ...]
    extent: tuple[float, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        origin = tuple(float(o) for o in self.origin)
        extent = tuple(float(e) for e in self.extent)
        if not (len(dims) == len(origin) == len(extent)) or not dims:
            raise ValueError("dims, origin and extent must have the same nonzero length")
        if any(n < 2 for n in dims):
            raise ValueError(f"need at least 2 points per axis, got {dims}")
        if any(not e > 0 for e in extent):
            raise ValueError(f"extent must be positive, got {extent}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "extent", extent)

    @classmethod
    def regular(cls, cells: int | Sequence[int], lo=0.0, hi=1.0, ndim: int | None = None) -> "Grid":
        """Grid with ``cells`` intervals per axis on ``[lo, hi]^ndim``."""
        if np.isscalar(cells):
            ndim = ndim or 1
            cells = (int(cells),) * ndim
        cells = tuple(int(c) for c in cells)
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (len(cells),))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (len(cells),))
        return cls(tuple(c + 1 for c in cells), tuple(lo), tuple(hi - lo))

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def cells(self) -> tuple[int, ...]:
        return tuple(n - 1 for n in self.dims)

    @property
    def cell_size(self) -> np.ndarray:
        return np.asarray(self.extent) / (np.asarray(self.dims) - 1)

    @property
    def cell_diagonal(self) -> float:
        return float(np.sqrt(np.sum(self.cell_size**2)))

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.origin)

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.origin) + np.asarray(self.extent)

    def coords(self, idx) -> np.ndarray:
        """Coordinates of integer indices ``idx`` of shape (N, ndim)."""
        idx = np.asarray(idx).reshape(-1, self.ndim)
        return self.lo + idx * self.cell_size

    def all_indices(self) -> np.ndarray:
        return np.indices(self.dims).reshape(self.ndim, -1).T

    def fractional_index(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.ndim)
        return (points - self.lo) / self.cell_size

    def snap(self, points, check: bool = True) -> np.ndarray:
        """Nearest grid indices; exact ties go to the lower index."""
        t = self.fractional_index(points)
        idx = np.ceil(t - 0.5 - SNAP_EPS).astype(np.int64)
        if check and idx.size:
            bad = np.any((idx < 0) | (idx >= np.asarray(self.dims)), axis=1)
            if np.any(bad):
                p = np.asarray(points).reshape(-1, self.ndim)[np.argmax(bad)]
                raise GridEscapeError(f"point {p.tolist()} lies outside the grid box")
        return idx

    def flat(self, idx) -> np.ndarray:
        idx = np.asarray(idx).reshape(-1, self.ndim)
        return np.ravel_multi_index(tuple(idx.T), self.dims)

    def unflat(self, flat) -> np.ndarray:
        return np.stack(np.unravel_index(np.asarray(flat), self.dims), axis=1)

    def subgrid(self, lo_idx, hi_idx) -> "Grid":
        """The grid points with indices in the box ``[lo_idx, hi_idx]``."""
        lo_idx = np.asarray(lo_idx, dtype=int).reshape(self.ndim)
        hi_idx = np.asarray(hi_idx, dtype=int).reshape(self.ndim)
        if np.any(lo_idx < 0) or np.any(hi_idx >= self.dims) or np.any(hi_idx <= lo_idx):
            raise ValueError(f"bad sub-box {lo_idx.tolist()}..{hi_idx.tolist()}")
        return Grid(
            tuple(hi_idx - lo_idx + 1),
            tuple(self.coords(lo_idx)[0]),
            tuple((hi_idx - lo_idx) * self.cell_size),
        )

    def offset_in(self, parent: "Grid") -> np.ndarray:
        """Index of this grid's origin inside ``parent`` (same spacing required)."""
        if not np.allclose(self.cell_size, parent.cell_size, rtol=1e-12, atol=0):
            raise ValueError("grids have different spacing")
        off = (self.lo - parent.lo) / parent.cell_size
        rounded = np.rint(off)
        if not np.allclose(off, rounded, atol=1e-6):
            raise ValueError("subgrid is not aligned with parent grid")
        return rounded.astype(np.int64)


def quantize(alpha, levels: int) -> np.ndarray:
    """Largest level ``j`` with ``j/L <= alpha``; keeps every quantized cut exact."""
    return np.floor(np.asarray(alpha, dtype=float) * levels + SNAP_EPS).astype(np.int64)


@dataclass(frozen=True, eq=False)
class FuzzySet:
    """Quantized fuzzy set on a grid; may be empty or non-normal.

    ``values`` holds integer levels 0..``levels`` and has shape ``grid.dims``.
    """

    grid: Grid
    levels: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.levels) < 1:
            raise ValueError("levels must be >= 1")
        object.__setattr__(self, "levels", int(self.levels))
        v = np.array(self.values, dtype=np.int64)
        if v.shape != self.grid.dims:
            raise ValueError(f"values shape {v.shape} != grid dims {self.grid.dims}")
        if v.size and (v.min() < 0 or v.max() > self.levels):
            raise ValueError(f"levels must lie in 0..{self.levels}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __eq__(self, other):
        if not isinstance(other, FuzzySet):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.levels == other.levels
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.grid, self.levels, self.values.tobytes()))

    @classmethod
    def from_points(cls, grid: Grid, levels: int, idx, level=None) -> "FuzzySet":
        """Fuzzy set taking ``level`` (default L) on indices ``idx``, 0 elsewhere."""
        values = np.zeros(grid.dims, dtype=np.int64)
        idx = np.asarray(idx, dtype=np.int64).reshape(-1, grid.ndim)
        lv = levels if level is None else level
        if idx.size:
            np.maximum.at(values.reshape(-1), grid.flat(idx), np.broadcast_to(lv, len(idx)))
        return cls(grid, levels, values)

    @property
    def is_normal(self) -> bool:
        return bool(np.any(self.values == self.levels))

    def support(self) -> np.ndarray:
        return np.argwhere(self.values >= 1)

    def at(self, idx) -> int:
        return int(self.values[tuple(np.asarray(idx, dtype=int).reshape(-1))])

    def membership(self) -> np.ndarray:
        return self.values / self.levels

    def as_compact(self) -> "CompactFuzzySet":
        return CompactFuzzySet(self.grid, self.levels, self.values)


class CompactFuzzySet(FuzzySet):
    """A normal quantized fuzzy set: some point carries the top level."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_normal:
            raise NotNormalError("fuzzy set is not normal: no point has level L")

    @classmethod
    def dirac(cls, grid: Grid, levels: int, point) -> "CompactFuzzySet":
        idx = grid.snap(np.asarray(point, dtype=float).reshape(1, -1))
        return cls.from_points(grid, levels, idx)

    @classmethod
    def characteristic(cls, grid: Grid, levels: int, idx) -> "CompactFuzzySet":
        return cls.from_points(grid, levels, idx)

    @classmethod
    def full(cls, grid: Grid, levels: int) -> "CompactFuzzySet":
        return cls(grid, levels, np.full(grid.dims, levels))


# --------------------------------------------------------------------------
# grey-level maps


@dataclass(frozen=True)
class GreyLevelMap:
    """Nondecreasing lookup table on levels with ``table[0] == 0``.

    As a map of [0, 1] it is the step function constant on [j/L, (j+1)/L),
    hence right continuous by construction.
    """

    table: tuple[int, ...]

    def __post_init__(self):
        t = tuple(int(x) for x in self.table)
        object.__setattr__(self, "table", t)
        if len(t) < 2:
            raise ValueError("grey table needs at least L+1 = 2 entries")
        L = len(t) - 1
        if t[0] != 0:
            raise ValueError(f"grey table must satisfy ϱ(0)=0, got table[0]={t[0]}")
        if any(b < a for a, b in zip(t, t[1:])):
            raise ValueError("grey table must be nondecreasing")
        if any(x < 0 or x > L for x in t):
            raise ValueError(f"grey table entries must lie in 0..{L}")

    @property
    def levels(self) -> int:
        return len(self.table) - 1

    @property
    def top(self) -> int:
        return self.table[-1]

    @classmethod
    def identity(cls, levels: int) -> "GreyLevelMap":
        return cls(tuple(range(levels + 1)))

    @classmethod
    def half_scale(cls, levels: int) -> "GreyLevelMap":
        return cls(tuple(j // 2 for j in range(levels + 1)))

    @classmethod
    def from_function(cls, rho: Callable[[float], float], levels: int) -> "GreyLevelMap":
        return cls(tuple(int(quantize(rho(j / levels), levels)) for j in range(levels + 1)))

    def resample(self, levels: int) -> "GreyLevelMap":
        """Carry the table to another level count by interpolating its nodes.

        Piecewise-linear through (j/L, table[j]/L), then floor-quantized: the
        identity stays the identity, and monotonicity, ϱ(0)=0 and ϱ(1) are kept.
        """
        L = self.levels
        nodes = np.arange(L + 1) / L
        vals = np.asarray(self.table) / L

        def rho(a):
            return float(np.interp(a, nodes, vals))

        return GreyLevelMap.from_function(rho, levels)

    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def __call__(self, j):
        return self.array()[np.asarray(j)]


@dataclass(frozen=True)
class GreySystem:
    """Admissible system: shared level count and some map with ϱ_j(1)=1."""

    maps: tuple[GreyLevelMap, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if not maps:
            raise ValueError("grey system needs at least one map")
        if len({m.levels for m in maps}) != 1:
            raise ValueError("grey maps must share the level count")
        if not any(m.top == m.levels for m in maps):
            raise ValueError("admissibility requires some grey map with ϱ_j(1)=1 (gL = L)")

    @property
    def levels(self) -> int:
        return self.maps[0].levels

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, i) -> GreyLevelMap:
        return self.maps[i]

    def __iter__(self):
        return iter(self.maps)


# --------------------------------------------------------------------------
# operations


def alpha_cut(u: FuzzySet, j: int) -> np.ndarray:
    """Indices of the level-``j`` cut; level 0 gives the support."""
    if not 0 <= j <= u.levels:
        raise ValueError(f"level {j} outside 0..{u.levels}")
    return np.argwhere(u.values >= max(j, 1))


def grey_threshold(rho: GreyLevelMap, j: int):
    """Smallest input level whose image reaches ``j``, or EMPTY past ϱ(1).

    Level 0 asks for strict positivity.  On a finite grid the closure branch
    for a zero-valued threshold collapses into the ordinary cut.
    """
    t = rho.table
    if not 0 <= j <= rho.levels:
        raise ValueError(f"level {j} outside 0..{rho.levels}")
    need = max(j, 1)
    if need > t[-1]:
        return EMPTY
    return next(m for m, g in enumerate(t) if g >= need)


def apply_grey(rho: GreyLevelMap, u: FuzzySet) -> FuzzySet:
    if rho.levels != u.levels:
        raise ValueError("grey map and fuzzy set use different level counts")
    return FuzzySet(u.grid, u.levels, rho.array()[u.values])


def pointwise_max(us: Sequence[FuzzySet]) -> FuzzySet:
    us = list(us)
    if not us:
        raise ValueError("pointwise_max needs at least one fuzzy set")
    g, L = us[0].grid, us[0].levels
    if any(v.grid != g or v.levels != L for v in us):
        raise ValueError("fuzzy sets must share grid and levels")
    return FuzzySet(g, L, np.maximum.reduce([v.values for v in us]))


def map_indices(f: Callable[[np.ndarray], np.ndarray], grid: Grid, idx) -> np.ndarray:
    """Snapped images of grid indices under a coordinate map."""
    idx = np.asarray(idx).reshape(-1, grid.ndim)
    if not len(idx):
        return idx.astype(np.int64)
    return grid.snap(f(grid.coords(idx)))


def zadeh_image(f: Callable[[np.ndarray], np.ndarray], u: FuzzySet) -> FuzzySet:
    """Push ``u`` forward through ``f``; collisions keep the larger level."""
    g = u.grid
    src = u.support()
    values = np.zeros(g.dims, dtype=np.int64)
    if len(src):
        dst = map_indices(f, g, src)
        np.maximum.at(values.reshape(-1), g.flat(dst), u.values[tuple(src.T)])
    out = FuzzySet(g, u.levels, values)
    return out.as_compact() if isinstance(u, CompactFuzzySet) else out


def restrict(u: FuzzySet, sub: Grid) -> FuzzySet:
    """Restriction of ``u`` to an aligned subgrid containing its support."""
    off = sub.offset_in(u.grid)
    sl = tuple(slice(o, o + n) for o, n in zip(off, sub.dims))
    inner = u.values[sl]
    if inner.sum() != u.values.sum():
        raise ValueError("support leaves the subgrid; the subgrid is not subinvariant for u")
    return type(u)(sub, u.levels, inner)


def extend(u: FuzzySet, full: Grid) -> FuzzySet:
    """Extension by zero of ``u`` from its subgrid to ``full``."""
    off = u.grid.offset_in(full)
    values = np.zeros(full.dims, dtype=np.int64)
    sl = tuple(slice(o, o + n) for o, n in zip(off, u.grid.dims))
    if any(o < 0 or o + n > N for o, n, N in zip(off, u.grid.dims, full.dims)):
        raise ValueError("subgrid does not fit inside the full grid")
    values[sl] = u.values
    return type(u)(full, u.levels, values)


def bounding_subgrid(u: FuzzySet) -> Grid:
    """Smallest aligned subgrid (at least 2 points per axis) holding the support."""
    s = u.support()
    lo, hi = s.min(axis=0), s.max(axis=0)
    dims = np.asarray(u.grid.dims)
    hi = np.where(hi == lo, np.minimum(hi + 1, dims - 1), hi)
    lo = np.where(hi == lo, lo - 1, lo)
    return u.grid.subgrid(lo, hi)
