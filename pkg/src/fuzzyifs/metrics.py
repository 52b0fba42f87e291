"""Pseudometrics on R^d and the distances they induce on point sets and fuzzy sets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.spatial import cKDTree

from .fuzzy_core import FuzzySet

_CHUNK = 1 << 22  # pair evaluations per brute-force block
_EDT_MIN_QUERIES = 256  # below this a k-d tree beats a full distance transform


@dataclass(frozen=True)
class Pseudometric:
    """A pseudometric on R^d.

    ``kind`` is one of ``euclid``, ``proj`` (|x_a - y_a| on ``axis``),
    ``wmax`` (max_a w_a |x_a - y_a|), ``max`` (pointwise max of ``members``)
    or ``product`` (max of ``members[0]`` on the leading coordinates and the
    absolute difference of the last coordinate).
    """

    kind: str
    axis: int | None = None
    weights: tuple[float, ...] | None = None
    members: tuple["Pseudometric", ...] = ()

    def __post_init__(self):
        if self.kind not in ("euclid", "proj", "wmax", "max", "product"):
            raise ValueError(f"unknown pseudometric kind {self.kind!r}")
        if self.kind == "proj" and (self.axis is None or self.axis < 0):
            raise ValueError("proj needs a nonnegative axis")
        if self.kind == "wmax":
            if not self.weights or any(w < 0 for w in self.weights):
                raise ValueError("wmax needs nonnegative weights")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.kind == "max" and not self.members:
            raise ValueError("max needs members")
        if self.kind == "product" and len(self.members) != 1:
            raise ValueError("product wraps exactly one base pseudometric")

    @property
    def name(self) -> str:
        if self.kind == "euclid":
            return "euclid"
        if self.kind == "proj":
            return f"proj:{self.axis}"
        if self.kind == "wmax":
            return "wmax:" + ",".join(_fmt_num(w) for w in self.weights)
        if self.kind == "max":
            return "max(" + ";".join(m.name for m in self.members) + ")"
        return f"product({self.members[0].name})"

    def __str__(self):
        return self.name

    def pairwise(self, A, B) -> np.ndarray:
        """Matrix of distances between rows of ``A`` and rows of ``B``."""
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        diff = np.abs(A[:, None, :] - B[None, :, :])
        return self._reduce(diff)

    def _reduce(self, diff: np.ndarray) -> np.ndarray:
        if self.kind == "euclid":
            return np.sqrt(np.sum(diff**2, axis=-1))
        if self.kind == "proj":
            return diff[..., self.axis]
        if self.kind == "wmax":
            w = np.asarray(self.weights)
            if len(w) != diff.shape[-1]:
                raise ValueError(f"wmax has {len(w)} weights for {diff.shape[-1]}-d points")
            return np.max(diff * w, axis=-1)
        if self.kind == "max":
            return np.maximum.reduce([m._reduce(diff) for m in self.members])
        base = self.members[0]._reduce(diff[..., :-1])
        return np.maximum(base, diff[..., -1])

    def __call__(self, x, y) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        return float(self._reduce(np.abs(x - y)[None, :])[0])

    def chebyshev_weights(self, ndim: int) -> np.ndarray | None:
        """Weights ``w`` with d(x,y) = max_a w_a|x_a-y_a|, if such exist."""
        if self.kind == "proj":
            if self.axis >= ndim:
                raise ValueError(f"proj axis {self.axis} out of range for {ndim}-d points")
            w = np.zeros(ndim)
            w[self.axis] = 1.0
            return w
        if self.kind == "wmax":
            return np.asarray(self.weights) if len(self.weights) == ndim else None
        if self.kind == "max":
            parts = [m.chebyshev_weights(ndim) for m in self.members]
            return None if any(p is None for p in parts) else np.maximum.reduce(parts)
        if self.kind == "product":
            base = self.members[0].chebyshev_weights(ndim - 1)
            return None if base is None else np.append(base, 1.0)
        return None


def euclid() -> Pseudometric:
    return Pseudometric("euclid")


def proj(axis: int) -> Pseudometric:
    return Pseudometric("proj", axis=axis)


def wmax(weights: Sequence[float]) -> Pseudometric:
    return Pseudometric("wmax", weights=tuple(weights))


def max_of(members: Sequence[Pseudometric]) -> Pseudometric:
    members = tuple(members)
    return members[0] if len(members) == 1 else Pseudometric("max", members=members)


def product_metric(d: Pseudometric) -> Pseudometric:
    """The max-combination of ``d`` on X and |a - b| on the level axis."""
    return Pseudometric("product", members=(d,))


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def parse_pseudometric(spec: str) -> Pseudometric:
    """Parse ``euclid``, ``proj:<axis>`` or ``wmax:<w1,...>``."""
    spec = spec.strip()
    if spec == "euclid":
        return euclid()
    head, _, tail = spec.partition(":")
    try:
        if head == "proj" and tail:
            return proj(int(tail))
        if head == "wmax" and tail:
            return wmax([float(w) for w in tail.split(",")])
    except ValueError as exc:
        raise ValueError(f"bad pseudometric spec {spec!r}: {exc}") from None
    raise ValueError(f"bad pseudometric spec {spec!r}; use euclid, proj:<axis> or wmax:<w1,...>")


@dataclass(frozen=True)
class PseudometricFamily:
    members: tuple[Pseudometric, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("family needs at least one pseudometric")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def separates(self, points) -> bool:
        """Spot-check: every pair of distinct points is told apart by some member."""
        P = np.asarray(points, dtype=float)
        for i, j in itertools.combinations(range(len(P)), 2):
            if np.array_equal(P[i], P[j]):
                continue
            if all(d(P[i], P[j]) == 0 for d in self.members):
                return False
        return True


def directed_closure(family: PseudometricFamily, max_subset: int = 2) -> PseudometricFamily:
    """Pointwise maxima of all nonempty subfamilies of size at most ``max_subset``."""
    if not 1 <= max_subset <= len(family):
        raise ValueError(f"max_subset must lie in 1..{len(family)}")
    out = []
    for r in range(1, max_subset + 1):
        for combo in itertools.combinations(family.members, r):
            out.append(max_of(combo))
    return PseudometricFamily(tuple(out))


# --------------------------------------------------------------------------
# point sets


def nearest_distances(d: Pseudometric, A, B) -> np.ndarray:
    """For each row of ``A``, the ``d``-distance to the closest row of ``B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if not len(A):
        return np.zeros(0)
    if not len(B):
        raise ValueError("distance to an empty set is undefined")
    ndim = A.shape[1]
    if d.kind == "euclid":
        return cKDTree(B).query(A, k=1)[0]
    w = d.chebyshev_weights(ndim)
    if w is not None:
        keep = w > 0
        if not np.any(keep):
            return np.zeros(len(A))
        return cKDTree(B[:, keep] * w[keep]).query(A[:, keep] * w[keep], k=1, p=np.inf)[0]
    out = np.empty(len(A))
    step = max(1, _CHUNK // max(1, len(B)))
    for s in range(0, len(A), step):
        out[s : s + step] = d.pairwise(A[s : s + step], B).min(axis=1)
    return out


def hausdorff(d: Pseudometric, A, B) -> float:
    """Hausdorff distance of two finite point sets; (∅, ∅) gives 0."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if not len(A) and not len(B):
        return 0.0
    if not len(A) or not len(B):
        raise ValueError("Hausdorff distance between an empty and a nonempty set is undefined")
    return float(max(nearest_distances(d, A, B).max(), nearest_distances(d, B, A).max()))


def diameter(d: Pseudometric, A) -> float:
    A = np.asarray(A, dtype=float)
    if len(A) < 2:
        return 0.0
    best = 0.0
    step = max(1, _CHUNK // len(A))
    for s in range(0, len(A), step):
        best = max(best, float(d.pairwise(A[s : s + step], A).max()))
    return best


# --------------------------------------------------------------------------
# fuzzy sets


def _check_pair(u: FuzzySet, v: FuzzySet):
    if u.grid != v.grid or u.levels != v.levels:
        raise ValueError("fuzzy sets must share grid and levels")


def cut_hausdorff(d: Pseudometric, u: FuzzySet, v: FuzzySet, j: int) -> float:
    """Hausdorff distance between the level-``j`` cuts of two fuzzy sets."""
    g = u.grid
    a = u.values >= max(j, 1)
    b = v.values >= max(j, 1)
    if not a.any() and not b.any():
        return 0.0
    if not a.any() or not b.any():
        raise ValueError("Hausdorff distance between an empty and a nonempty set is undefined")
    # shared points are at distance 0, so only the differences need queries
    out = 0.0
    for src, dst in ((a, b), (b, a)):
        only = np.argwhere(src & ~dst)
        if len(only):
            out = max(out, float(grid_nearest(d, g, only, dst).max()))
    return out


def grid_nearest(d: Pseudometric, grid, idx, mask: np.ndarray) -> np.ndarray:
    """Distances from grid indices ``idx`` to the nearest grid point in ``mask``."""
    if d.kind == "euclid" and len(idx) >= _EDT_MIN_QUERIES:
        field = distance_transform_edt(~mask, sampling=grid.cell_size)
        return field[tuple(np.asarray(idx).T)]
    return nearest_distances(d, grid.coords(idx), grid.coords(np.argwhere(mask)))


def fuzzy_hausdorff(d: Pseudometric, u: FuzzySet, v: FuzzySet) -> float:
    """Largest Hausdorff distance between same-level cuts, levels 0..L."""
    _check_pair(u, v)
    if u == v:
        return 0.0
    # level 0 and level 1 cuts coincide on a grid
    return max(cut_hausdorff(d, u, v, j) for j in range(1, u.levels + 1))


def hypo_points(u: FuzzySet) -> np.ndarray:
    """Points (x, j/L) with x in the support and 0 <= j <= level(x)."""
    idx = u.support()
    lv = u.values[tuple(idx.T)]
    x = np.repeat(u.grid.coords(idx), lv + 1, axis=0)
    a = np.concatenate([np.arange(n + 1) for n in lv]) if len(lv) else np.zeros(0)
    return np.column_stack([x, a / u.levels])


def hypo0_points(u: FuzzySet) -> np.ndarray:
    """Hypograph points together with the whole base plane at level 0."""
    base = np.column_stack([u.grid.coords(u.grid.all_indices()), np.zeros(u.grid.size)])
    return np.unique(np.vstack([hypo_points(u), base]), axis=0)


def _directed_hypo(d: Pseudometric, u: FuzzySet, v: FuzzySet, with_base: bool) -> float:
    # A point (x, a) of hypo(u) is farthest from hypo(v) at its top a = u(x);
    # the distance is min over levels m of max(d(x, cut_m v), (a - m/L)^+).
    g, L = u.grid, u.levels
    # points with v(x) >= u(x) sit inside hypo(v) already
    idx = np.argwhere(u.values > v.values)
    if not len(idx):
        return 0.0
    a = u.values[tuple(idx.T)] / L
    best = np.full(len(idx), np.inf)
    top = int(v.values.max())
    for m in range(1, top + 1):
        near = grid_nearest(d, g, idx, v.values >= m)
        best = np.minimum(best, np.maximum(near, np.maximum(a - m / L, 0.0)))
    if with_base:
        best = np.minimum(best, a)
    return float(best.max())


def hypo_distance(d: Pseudometric, u: FuzzySet, v: FuzzySet) -> float:
    """Hausdorff distance of hypographs under the max product metric."""
    _check_pair(u, v)
    if u == v:
        return 0.0
    return max(_directed_hypo(d, u, v, False), _directed_hypo(d, v, u, False))


def hypo0_distance(d: Pseudometric, u: FuzzySet, v: FuzzySet) -> float:
    """As :func:`hypo_distance` with the base plane X x {0} added to both sides."""
    _check_pair(u, v)
    if u == v:
        return 0.0
    return max(_directed_hypo(d, u, v, True), _directed_hypo(d, v, u, True))


def linf_distance(u: FuzzySet, v: FuzzySet) -> float:
    _check_pair(u, v)
    return float(np.abs(u.values - v.values).max()) / u.levels


def pointwise_gap(u: FuzzySet, v: FuzzySet, idx) -> float:
    _check_pair(u, v)
    return abs(u.at(idx) - v.at(idx)) / u.levels


DISTANCES = ("dhf", "dh", "dh0", "dinf", "hausdorff")


def distance(name: str, d: Pseudometric, u: FuzzySet, v: FuzzySet) -> float:
    """Distance by CLI name; ``hausdorff`` compares the supports."""
    if name == "dhf":
        return fuzzy_hausdorff(d, u, v)
    if name == "dh":
        return hypo_distance(d, u, v)
    if name == "dh0":
        return hypo0_distance(d, u, v)
    if name == "dinf":
        return linf_distance(u, v)
    if name == "hausdorff":
        _check_pair(u, v)
        return hausdorff(d, u.grid.coords(u.support()), v.grid.coords(v.support()))
    raise ValueError(f"unknown distance {name!r}; choose from {', '.join(DISTANCES)}")


def parse_metric(spec: str) -> tuple[str, Pseudometric]:
    """``"dhf euclid"`` or ``"dhf"`` -> (distance name, pseudometric)."""
    parts = spec.split()
    if len(parts) > 2 or not parts or parts[0] not in DISTANCES:
        raise ValueError(f"bad metric spec {spec!r}; start with one of {', '.join(DISTANCES)}")
    d = parse_pseudometric(parts[1]) if len(parts) > 1 else euclid()
    return parts[0], d
