"""Code-space addresses, the projection map and the projection-built attractor."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fuzzy_core import CompactFuzzySet, FuzzySet, Grid, GreySystem
from .ifs_engine import ContractionMap, FuzzyIFS, compose_address, lipschitz_bound
from .metrics import euclid


@dataclass(frozen=True)
class Address:
    """Finite word over {1..k}, a truncation of an infinite code."""

    symbols: tuple[int, ...]
    k: int

    def __post_init__(self):
        s = tuple(int(x) for x in self.symbols)
        object.__setattr__(self, "symbols", s)
        if self.k < 1:
            raise ValueError("alphabet size k must be >= 1")
        if any(not 1 <= x <= self.k for x in s):
            raise ValueError(f"address symbols must lie in 1..{self.k}: {s}")

    @classmethod
    def parse(cls, text: str, k: int) -> "Address":
        text = text.replace(",", " ").strip()
        return cls(tuple(int(t) for t in text.split()) if text else (), k)

    @property
    def depth(self) -> int:
        return len(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return " ".join(map(str, self.symbols)) or "()"


@dataclass(frozen=True)
class GreyLimit:
    level: int
    stabilized_at: int
    partials: tuple[int, ...]  # partials[n] = rho_{s1} o ... o rho_{sn}(L)


def project(maps: Sequence[ContractionMap], address: Address | Sequence[int], seed, grid: Grid | None = None):
    """f_{s1} o ... o f_{sN}(seed); snapped to ``grid`` when one is given."""
    symbols = address.symbols if isinstance(address, Address) else tuple(address)
    F = compose_address(maps, symbols)
    p = F(np.asarray(seed, dtype=float).reshape(1, -1))
    if grid is None:
        return p[0]
    return grid.coords(grid.snap(p))[0]


def grey_limit(greys: GreySystem, address: Address | Sequence[int]) -> GreyLimit:
    """Fold the grey tables along the address; the partial values never increase."""
    symbols = address.symbols if isinstance(address, Address) else tuple(address)
    L = greys.levels
    comp = np.arange(L + 1)  # composed table rho_{s1} o ... o rho_{sn}
    partials = [L]
    for s in symbols:
        comp = comp[greys[s - 1].array()]
        partials.append(int(comp[L]))
    last = len(partials) - 1
    while last > 0 and partials[last - 1] == partials[-1]:
        last -= 1
    return GreyLimit(partials[-1], last, tuple(partials))


class BudgetExceededError(RuntimeError):
    pass


def projection_pairs(SF: FuzzyIFS, grid: Grid, depth: int, seed, budget: int = 2_000_000):
    """Snapped points and grey levels of all surviving addresses of length ``depth``.

    Prefixes whose composed grey value is already 0 are pruned; grey maps fix
    0, so they cannot contribute.  Returns (indices, levels, residual) where
    ``residual`` is the largest level still changing at the last step.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    n, L = SF.ndim, SF.levels
    A = np.eye(n)[None, :, :]
    b = np.zeros((1, n))
    T = np.arange(L + 1)[None, :]
    mats = np.stack([f.matrix for f in SF.maps])
    offs = np.stack([f.offset for f in SF.maps])
    tabs = np.stack([g.array() for g in SF.greys])
    prev = np.full(1, L)
    for _ in range(depth):
        if len(A) * SF.k > budget:
            raise BudgetExceededError(
                f"{len(A) * SF.k} live addresses exceed the budget of {budget}; "
                "reduce the depth or raise the budget"
            )
        # new composition F o f_s: matrix A A_s, offset A b_s + b
        A2 = np.einsum("pij,sjk->psik", A, mats).reshape(-1, n, n)
        b2 = (np.einsum("pij,sj->psi", A, offs) + b[:, None, :]).reshape(-1, n)
        T2 = np.take_along_axis(
            np.repeat(T, SF.k, axis=0), np.tile(tabs, (len(T), 1)), axis=1
        )
        prev = np.repeat(T[:, L], SF.k)
        keep = T2[:, L] > 0
        A, b, T, prev = A2[keep], b2[keep], T2[keep], prev[keep]
    seed = np.asarray(seed, dtype=float).reshape(n)
    pts = np.einsum("pij,j->pi", A, seed) + b
    levels = T[:, L]
    changing = levels != prev
    residual = int(levels[changing].max()) if depth and np.any(changing) else 0
    return grid.snap(pts), levels, residual


def merge_by_max(grid: Grid, levels: int, idx, values) -> FuzzySet:
    """Fuzzy set taking at each cell the largest value landing there."""
    out = np.zeros(grid.size, dtype=np.int64)
    idx = np.asarray(idx).reshape(-1, grid.ndim)
    if len(idx):
        np.maximum.at(out, grid.flat(idx), np.asarray(values, dtype=np.int64))
    return FuzzySet(grid, levels, out.reshape(grid.dims))


@dataclass
class ProjectionAttractor:
    u: CompactFuzzySet
    depth: int
    addresses: int
    spatial_error: float  # bound on the distance to the untruncated projection
    grey_residual: int


def contraction_factor(SF: FuzzyIFS) -> float:
    return max(lipschitz_bound(f, euclid()) for f in SF.maps)


def attractor_via_projection(
    SF: FuzzyIFS, grid: Grid, depth: int, seed=None, box=None, budget: int = 2_000_000
) -> ProjectionAttractor:
    """The image of the grey-limit function under the truncated projection."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if seed is None:
        seed = (grid.lo + grid.hi) / 2 if box is None else grid.coords(np.add(*box) // 2)[0]
    idx, levels, residual = projection_pairs(SF, grid, depth, seed, budget)
    u = merge_by_max(grid, SF.levels, idx, levels).as_compact()
    c = contraction_factor(SF)
    if box is None:
        diam = float(np.linalg.norm(grid.extent))
    else:
        diam = float(np.linalg.norm((np.asarray(box[1]) - box[0]) * grid.cell_size))
    err = (c**depth) * diam + grid.cell_diagonal / 2
    return ProjectionAttractor(u, depth, len(idx), err, residual)


def depth_for_resolution(c: float, diam: float, cell: float) -> int:
    """Smallest depth with c^N * diam below one cell."""
    if not 0 < c < 1:
        raise ValueError("need a contraction factor in (0, 1)")
    return max(0, math.ceil(math.log(diam / cell) / math.log(1 / c)))


def all_addresses(k: int, depth: int) -> Iterable[Address]:
    for w in itertools.product(range(1, k + 1), repeat=depth):
        yield Address(w, k)
