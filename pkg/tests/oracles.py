"""Brute-force reference implementations used as test oracles.

Everything here is written with plain Python loops over grid points and
level indices, sharing no code path with the vectorised library beyond the
grid coordinate convention and single-point snapping.
"""
import itertools
import math

import numpy as np


def point_dist(kind, x, y, axis=None, weights=None):
    if kind == "euclid":
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))
    if kind == "proj":
        return abs(x[axis] - y[axis])
    if kind == "wmax":
        return max(w * abs(a - b) for w, a, b in zip(weights, x, y))
    raise ValueError(kind)


def brute_hausdorff(dist, A, B):
    A, B = [tuple(p) for p in A], [tuple(p) for p in B]
    if not A and not B:
        return 0.0
    ab = max(min(dist(a, b) for b in B) for a in A)
    ba = max(min(dist(a, b) for a in A) for b in B)
    return max(ab, ba)


def grid_points(grid):
    for idx in itertools.product(*(range(n) for n in grid.dims)):
        yield idx


def coord(grid, idx):
    return tuple(o + i * c for o, i, c in zip(grid.origin, idx, grid.cell_size))


def brute_cut(u, j):
    need = max(j, 1)
    return [idx for idx in grid_points(u.grid) if u.values[idx] >= need]


def brute_cut_coords(u, j):
    return [coord(u.grid, i) for i in brute_cut(u, j)]


def brute_dhf(dist, u, v):
    return max(brute_hausdorff(dist, brute_cut_coords(u, j), brute_cut_coords(v, j)) for j in range(u.levels + 1))


def brute_hypo(u, base=False):
    L = u.levels
    pts = set()
    for idx in grid_points(u.grid):
        x = coord(u.grid, idx)
        if u.values[idx] >= 1:
            for j in range(u.values[idx] + 1):
                pts.add(x + (j / L,))
        if base:
            pts.add(x + (0.0,))
    return sorted(pts)


def product_dist(dist):
    return lambda p, q: max(dist(p[:-1], q[:-1]), abs(p[-1] - q[-1]))


def brute_dh(dist, u, v):
    return brute_hausdorff(product_dist(dist), brute_hypo(u), brute_hypo(v))


def brute_dh0(dist, u, v):
    return brute_hausdorff(product_dist(dist), brute_hypo(u, True), brute_hypo(v, True))


def brute_linf(u, v):
    return max(abs(int(u.values[i]) - int(v.values[i])) for i in grid_points(u.grid)) / u.levels


def brute_zadeh(f, u):
    """Image via exhaustive preimage enumeration over all (x, y) pairs."""
    g = u.grid
    image = {}
    for x in grid_points(g):
        if u.values[x] >= 1:
            image[x] = tuple(g.snap(f(np.array([coord(g, x)])))[0])
    out = np.zeros(g.dims, dtype=np.int64)
    for y in grid_points(g):
        pre = [u.values[x] for x, fx in image.items() if fx == y]
        out[y] = max(pre, default=0)
    return out


def brute_threshold(table, j):
    need = max(j, 1)
    for m, t in enumerate(table):
        if t >= need:
            return m
    return None


def brute_hutchinson(maps, tables, u):
    """max_i table_i[f_i[u]] evaluated point by point."""
    out = np.zeros(u.grid.dims, dtype=np.int64)
    for f, t in zip(maps, tables):
        img = brute_zadeh(f, u)
        for y in grid_points(u.grid):
            out[y] = max(out[y], t[img[y]])
    return out
