"""Contraction maps, comparison functions and the (fuzzy) Hutchinson operators."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .fuzzy_core import (
    CompactFuzzySet,
    FuzzySet,
    Grid,
    GreySystem,
    apply_grey,
    alpha_cut,
    grey_threshold,
    map_indices,
    pointwise_max,
    zadeh_image,
    EMPTY,
)
from .metrics import Pseudometric, diameter, distance, euclid, hypo_distance


@dataclass(frozen=True)
class ComparisonFunction:
    """Nondecreasing self-map of [0, inf) whose iterates should vanish.

    ``linear`` is t -> c t.  ``table`` interpolates samples on [0, t_max]
    and continues with slope one beyond.  ``max`` is the pointwise maximum
    of ``parts``.
    """

    kind: str
    c: float = 0.0
    ts: tuple[float, ...] = ()
    vs: tuple[float, ...] = ()
    parts: tuple["ComparisonFunction", ...] = ()

    def __post_init__(self):
        if self.kind == "linear" and not 0 <= self.c < 1:
            raise ValueError(f"linear comparison factor must lie in [0, 1), got {self.c}")
        if self.kind == "table":
            if len(self.ts) != len(self.vs) or len(self.ts) < 2 or self.ts[0] != 0:
                raise ValueError("table needs matching samples starting at t = 0")
            if np.any(np.diff(self.ts) <= 0):
                raise ValueError("table arguments must increase")
        if self.kind == "max" and not self.parts:
            raise ValueError("max needs parts")
        if self.kind not in ("linear", "table", "max"):
            raise ValueError(f"unknown comparison function kind {self.kind!r}")

    @classmethod
    def linear(cls, c: float) -> "ComparisonFunction":
        return cls("linear", c=float(c))

    @classmethod
    def table(cls, ts, vs) -> "ComparisonFunction":
        return cls("table", ts=tuple(map(float, ts)), vs=tuple(map(float, vs)))

    @classmethod
    def maximum(cls, *phis: "ComparisonFunction") -> "ComparisonFunction":
        return phis[0] if len(phis) == 1 else cls("max", parts=tuple(phis))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "linear":
            out = self.c * t
        elif self.kind == "table":
            tmax, vmax = self.ts[-1], self.vs[-1]
            out = np.where(t <= tmax, np.interp(t, self.ts, self.vs), vmax + (t - tmax))
        else:
            out = np.maximum.reduce([p(t) for p in self.parts])
        return out if out.ndim else float(out)

    def check(self, t_max: float, samples: int = 257, n_max: int = 10_000, tol: float = 1e-9) -> bool:
        """Nondecreasing on a sample grid and iterates fall below ``tol`` within ``n_max``."""
        ts = np.linspace(0.0, t_max, samples)
        vs = np.asarray(self(ts))
        if np.any(np.diff(vs) < 0) or np.any(vs < 0):
            return False
        x = ts.copy()
        for _ in range(n_max):
            if np.all(x <= tol):
                return True
            x = np.asarray(self(x))
        return bool(np.all(x <= tol))


@dataclass(frozen=True, eq=False)
class ContractionMap:
    """Affine map x -> A x + b with optional per-pseudometric witnesses."""

    matrix: np.ndarray
    offset: np.ndarray
    witnesses: Mapping[str, ComparisonFunction] = field(default_factory=dict)

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float, ndmin=2)
        b = np.array(self.offset, dtype=float).reshape(-1)
        if A.shape != (len(b), len(b)):
            raise ValueError(f"matrix shape {A.shape} does not match offset length {len(b)}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", b)
        object.__setattr__(self, "witnesses", dict(self.witnesses))

    def __eq__(self, other):
        if not isinstance(other, ContractionMap):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix) and np.array_equal(self.offset, other.offset)

    def __hash__(self):
        return hash((self.matrix.tobytes(), self.offset.tobytes()))

    @property
    def ndim(self) -> int:
        return len(self.offset)

    def __call__(self, points) -> np.ndarray:
        P = np.asarray(points, dtype=float).reshape(-1, self.ndim)
        # explicit sums keep results independent of BLAS blocking
        out = np.tile(self.offset, (len(P), 1))
        for i in range(self.ndim):
            for j in range(self.ndim):
                if self.matrix[i, j] != 0:
                    out[:, i] += self.matrix[i, j] * P[:, j]
        return out

    def compose(self, inner: "ContractionMap") -> "ContractionMap":
        """self o inner."""
        return ContractionMap(self.matrix @ inner.matrix, self.matrix @ inner.offset + self.offset)

    def witness(self, d: Pseudometric) -> ComparisonFunction | None:
        if d.name in self.witnesses:
            return self.witnesses[d.name]
        c = lipschitz_bound(self, d)
        return ComparisonFunction.linear(c) if c < 1 else None


def lipschitz_bound(f: ContractionMap, d: Pseudometric) -> float:
    """Upper bound on sup d(f x, f y) / d(x, y); inf when none exists."""
    A = f.matrix
    if d.kind == "euclid":
        return float(np.linalg.norm(A, 2))
    if d.kind in ("proj", "wmax"):
        w = d.chebyshev_weights(f.ndim)
        # need w_i |A_ij| = 0 whenever w_j = 0 < w_i
        best = 0.0
        for i in range(f.ndim):
            if w[i] == 0:
                continue
            s = 0.0
            for j in range(f.ndim):
                if A[i, j] == 0:
                    continue
                if w[j] == 0:
                    return math.inf
                s += w[i] * abs(A[i, j]) / w[j]
            best = max(best, s)
        return best
    if d.kind == "max":
        return max(lipschitz_bound(f, m) for m in d.members)
    raise ValueError(f"no Lipschitz bound for pseudometric kind {d.kind!r}")


def affine(a, b, witnesses=None) -> ContractionMap:
    return ContractionMap(np.asarray(a, dtype=float), np.asarray(b, dtype=float), witnesses or {})


def sierpinski_maps() -> tuple[ContractionMap, ...]:
    """Half-scale maps toward the corners (0,0), (1,0), (0,1) of the unit square."""
    h = np.eye(2) / 2
    return (affine(h, [0, 0]), affine(h, [0.5, 0]), affine(h, [0, 0.5]))


def halving_map() -> ContractionMap:
    return affine([[0.5]], [0.0])


@dataclass(frozen=True)
class FuzzyIFS:
    maps: tuple[ContractionMap, ...]
    greys: GreySystem

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise ValueError("a fuzzy IFS needs at least one map")
        if len(self.maps) != len(self.greys):
            raise ValueError(f"{len(self.maps)} maps but {len(self.greys)} grey maps")
        if len({f.ndim for f in self.maps}) != 1:
            raise ValueError("maps act on spaces of different dimension")

    @property
    def k(self) -> int:
        return len(self.maps)

    @property
    def levels(self) -> int:
        return self.greys.levels

    @property
    def ndim(self) -> int:
        return self.maps[0].ndim


# --------------------------------------------------------------------------
# operators


def hutchinson(maps: Sequence[ContractionMap], grid: Grid, K) -> np.ndarray:
    """Union of snapped images of the index set ``K``; sorted unique indices."""
    K = np.asarray(K).reshape(-1, grid.ndim)
    if not len(K):
        raise ValueError("Hutchinson operator needs a nonempty set")
    images = np.vstack([map_indices(f, grid, K) for f in maps])
    return np.unique(images, axis=0)


def crisp_fixed_set(maps: Sequence[ContractionMap], grid: Grid, K=None, max_iter: int = 10_000) -> np.ndarray:
    """Iterate the crisp operator from ``K`` (default: whole grid) until it repeats."""
    K = grid.all_indices() if K is None else np.asarray(K).reshape(-1, grid.ndim)
    K = np.unique(K, axis=0)
    for _ in range(max_iter):
        nxt = hutchinson(maps, grid, K)
        if np.array_equal(nxt, K):
            return K
        K = nxt
    raise RuntimeError("crisp Hutchinson iteration did not settle")


def fuzzy_hutchinson_pointwise(SF: FuzzyIFS, u: FuzzySet) -> CompactFuzzySet:
    """max_i rho_i o f_i[u], evaluated pointwise."""
    parts = [apply_grey(rho, zadeh_image(f, u)) for f, rho in zip(SF.maps, SF.greys)]
    return pointwise_max(parts).as_compact()


def fuzzy_hutchinson_cuts(SF: FuzzyIFS, u: FuzzySet) -> CompactFuzzySet:
    """Assemble the image level by level from union of f_i(cut of u at beta_i(j))."""
    g, L = u.grid, u.levels
    if SF.levels != L:
        raise ValueError("system and fuzzy set use different level counts")
    flat = np.zeros(g.size, dtype=np.int64)
    for j in range(1, L + 1):
        for f, rho in zip(SF.maps, SF.greys):
            m = grey_threshold(rho, j)
            if m is EMPTY:
                continue
            cut = alpha_cut(u, m)
            if len(cut):
                flat[g.flat(map_indices(f, g, cut))] = j
    result = FuzzySet(g, L, flat.reshape(g.dims))
    if not result.is_normal:
        raise AssertionError("fuzzy Hutchinson output lost normality; grey system not admissible?")
    return result.as_compact()


fuzzy_hutchinson = fuzzy_hutchinson_pointwise


class NotConvergedError(RuntimeError):
    def __init__(self, msg, trace, trace_dh):
        super().__init__(msg)
        self.trace = trace
        self.trace_dh = trace_dh


@dataclass
class FixpointResult:
    u: CompactFuzzySet
    trace: list[float]
    trace_dh: list[float]
    metric: str
    pseudometric: str
    tol: float

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1

    @property
    def certificate(self) -> float:
        return self.trace[-1]


def iterate_to_fixpoint(
    SF: FuzzyIFS,
    u0: FuzzySet,
    metric: str = "dhf",
    d: Pseudometric | None = None,
    tol: float | None = None,
    max_iter: int = 1000,
) -> FixpointResult:
    """Apply the fuzzy Hutchinson operator until one more step moves at most ``tol``.

    ``trace[n]`` is the distance between iterates n and n+1, in the chosen
    metric; ``trace_dh`` records the hypograph distance alongside.
    """
    d = d or euclid()
    tol = u0.grid.cell_diagonal if tol is None else float(tol)
    if not tol > 0:
        raise ValueError("tol must be positive")
    u = u0.as_compact()
    trace, trace_dh = [], []
    for _ in range(max_iter + 1):
        nxt = fuzzy_hutchinson(SF, u)
        trace.append(distance(metric, d, nxt, u))
        trace_dh.append(hypo_distance(d, nxt, u))
        if trace[-1] <= tol and trace_dh[-1] <= tol:
            return FixpointResult(u, trace, trace_dh, metric, d.name, tol)
        u = nxt
    raise NotConvergedError(
        f"no fixed point within {max_iter} iterations (last step {trace[-1]:.9f} > tol {tol:.9f})",
        trace,
        trace_dh,
    )


# --------------------------------------------------------------------------
# contraction diagnostics


@dataclass
class MatkowskiReport:
    samples: int
    violations: int
    worst_slack: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def verify_matkowski(
    f: ContractionMap,
    d: Pseudometric,
    phi: ComparisonFunction,
    samples: int = 1000,
    rng: np.random.Generator | int | None = 0,
    box=None,
) -> MatkowskiReport:
    """Sample d(f x, f y) <= phi(d(x, y)); reports the smallest slack seen.

    This is evidence on the sampled pairs, not a proof.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng)
    lo, hi = (np.zeros(f.ndim), np.ones(f.ndim)) if box is None else map(np.asarray, box)
    X = rng.uniform(lo, hi, size=(samples, f.ndim))
    Y = rng.uniform(lo, hi, size=(samples, f.ndim))
    dxy = d._reduce(np.abs(X - Y))
    dfxy = d._reduce(np.abs(f(X) - f(Y)))
    slack = np.asarray(phi(dxy)) - dfxy
    viol = int(np.sum(slack < -1e-12))
    return MatkowskiReport(samples, viol, float(slack.min()))


def sample_edelstein(f: ContractionMap, d: Pseudometric, samples: int = 1000, rng=0, box=None) -> int:
    """Number of sampled pairs violating d(f x, f y) < d(x, y) for d(x, y) > 0."""
    rng = np.random.default_rng(rng)
    lo, hi = (np.zeros(f.ndim), np.ones(f.ndim)) if box is None else map(np.asarray, box)
    X = rng.uniform(lo, hi, size=(samples, f.ndim))
    Y = rng.uniform(lo, hi, size=(samples, f.ndim))
    dxy = d._reduce(np.abs(X - Y))
    dfxy = d._reduce(np.abs(f(X) - f(Y)))
    return int(np.sum((dxy > 0) & (dfxy >= dxy)))


class NoInvariantBoxError(RuntimeError):
    pass


def _box_corners(lo, hi) -> np.ndarray:
    return np.array(list(itertools.product(*zip(lo, hi))), dtype=float)


def invariant_box(maps: Sequence[ContractionMap], grid: Grid, seed_lo, seed_hi=None, max_iter: int = 10_000):
    """Grow an index box from the seed until every map sends it into itself.

    Returns (lo_idx, hi_idx), inclusive.  Works in index space; since the box
    is convex and its corners are grid points, snapped images of its points
    stay inside.
    """
    seed_hi = seed_lo if seed_hi is None else seed_hi
    lo = grid.snap(np.asarray(seed_lo, dtype=float).reshape(1, -1))[0]
    hi = grid.snap(np.asarray(seed_hi, dtype=float).reshape(1, -1))[0]
    dims = np.asarray(grid.dims)
    for _ in range(max_iter):
        corners = grid.coords(_box_corners(lo, hi))
        t = np.vstack([grid.fractional_index(f(corners)) for f in maps])
        tmin, tmax = t.min(axis=0), t.max(axis=0)
        if np.all(tmin >= lo - 1e-9) and np.all(tmax <= hi + 1e-9):
            return lo, hi
        lo = np.minimum(lo, np.floor(tmin + 1e-9).astype(np.int64))
        hi = np.maximum(hi, np.ceil(tmax - 1e-9).astype(np.int64))
        if np.any(lo < 0) or np.any(hi >= dims):
            raise NoInvariantBoxError("no invariant box inside the grid: images escape the domain")
    raise NoInvariantBoxError(f"no invariant box found within {max_iter} growth steps")


def box_indices(grid: Grid, lo, hi, max_per_axis: int | None = None) -> np.ndarray:
    axes = []
    for a, b in zip(lo, hi):
        r = np.arange(a, b + 1)
        if max_per_axis and len(r) > max_per_axis:
            r = np.unique(np.linspace(a, b, max_per_axis).round().astype(np.int64))
        axes.append(r)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def compose_address(maps: Sequence[ContractionMap], prefix: Sequence[int]) -> ContractionMap:
    """f_{s1} o ... o f_{sn} for 1-based symbols."""
    n = maps[0].ndim
    out = affine(np.eye(n), np.zeros(n))
    for s in prefix:
        out = out.compose(maps[s - 1])
    return out


def fiber_diameter(
    maps: Sequence[ContractionMap],
    prefix: Sequence[int],
    grid: Grid,
    box,
    d: Pseudometric,
    max_per_axis: int = 65,
) -> float:
    """Diameter of the snapped image of the box's grid sample under the composed prefix."""
    lo, hi = box
    F = compose_address(maps, prefix)
    pts = grid.coords(box_indices(grid, lo, hi, max_per_axis))
    img = np.unique(grid.snap(F(pts)), axis=0)
    return diameter(d, grid.coords(img))
