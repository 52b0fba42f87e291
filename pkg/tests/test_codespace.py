import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import grey_systems
from fuzzyifs.codespace import (
    Address,
    BudgetExceededError,
    all_addresses,
    attractor_via_projection,
    depth_for_resolution,
    grey_limit,
    merge_by_max,
    project,
    projection_pairs,
)
from fuzzyifs.fuzzy_core import CompactFuzzySet, GreyLevelMap, GreySystem, Grid
from fuzzyifs.ifs_engine import FuzzyIFS, affine, halving_map, sierpinski_maps


def sierpinski(L, greys=None):
    greys = greys or (GreyLevelMap.identity(L),) * 3
    return FuzzyIFS(sierpinski_maps(), GreySystem(tuple(greys)))


def test_address_validation():
    assert Address.parse("1, 3 2", 3).symbols == (1, 3, 2)
    assert Address.parse("", 2).depth == 0
    assert str(Address((2, 1), 2)) == "2 1"
    with pytest.raises(ValueError):
        Address((0,), 2)
    with pytest.raises(ValueError):
        Address((3,), 2)


def test_project_halving():
    g = Grid.regular(1024)
    for n in range(0, 11):
        p = project([halving_map()], (1,) * n, [1.0], g)
        assert p[0] == pytest.approx(0.5**n)
    assert project([halving_map()], (), [0.3])[0] == 0.3


def test_project_seed_independence():
    g = Grid.regular(256, ndim=2)
    maps = sierpinski_maps()
    N = depth_for_resolution(0.5, math.sqrt(2), g.cell_size[0])
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = Address(tuple(rng.integers(1, 4, N)), 3)
        p = project(maps, a, [0.0, 0.0])
        q = project(maps, a, [1.0, 1.0])
        assert np.linalg.norm(p - q) <= g.cell_size[0]


def test_project_depth_step_bound():
    maps = sierpinski_maps()
    rng = np.random.default_rng(1)
    for N in range(1, 10):
        s = tuple(rng.integers(1, 4, N + 1))
        p, q = project(maps, s[:N], [0.3, 0.3]), project(maps, s, [0.3, 0.3])
        assert np.linalg.norm(p - q) <= 0.5**N * math.sqrt(2) + 1e-12


def test_grey_limit_examples():
    L = 16
    ident = GreySystem((GreyLevelMap.identity(L),) * 2)
    assert grey_limit(ident, (1, 2, 1, 2)).level == L
    half = GreySystem((GreyLevelMap.half_scale(L), GreyLevelMap.identity(L)))
    lim = grey_limit(half, (1,) * 10)
    assert lim.level == 0
    assert lim.stabilized_at <= math.ceil(math.log2(L)) + 1
    assert lim.partials[:6] == (16, 8, 4, 2, 1, 0)


def test_grey_limit_mixed_fold():
    L = 8
    r1 = GreyLevelMap.identity(L)
    r2 = GreyLevelMap((0, 1, 1, 2, 3, 3, 4, 5, 6))
    greys = GreySystem((r1, r2))
    s = (1, 2, 2, 1, 2)
    # direct composition rho_{s1}(rho_{s2}(...rho_{sn}(L)))
    direct = L
    for sym in reversed(s):
        direct = greys[sym - 1].table[direct]
    assert grey_limit(greys, s).level == direct


@given(st.data())
def test_grey_limit_properties(data):
    L = data.draw(st.integers(1, 12))
    k = data.draw(st.integers(1, 3))
    greys = data.draw(grey_systems(L, k))
    s = data.draw(st.lists(st.integers(1, k), max_size=40))
    lim = grey_limit(greys, s)
    p = lim.partials
    assert all(b <= a for a, b in zip(p, p[1:]))
    assert sum(b < a for a, b in zip(p, p[1:])) <= L
    assert all(x == 0 for x in p[p.index(0):]) if 0 in p else True
    assert all(x == lim.level for x in p[lim.stabilized_at:])


def test_projection_pairs_prune_and_budget():
    L = 4
    zero_branch = GreyLevelMap((0, 0, 0, 0, 0))
    SF = FuzzyIFS((halving_map(), affine([[0.5]], [0.5])), GreySystem((GreyLevelMap.identity(L), zero_branch)))
    g = Grid.regular(64)
    idx, levels, _ = projection_pairs(SF, g, 6, [0.5])
    assert len(idx) == 1 and levels.tolist() == [L]  # only the all-ones address survives
    with pytest.raises(BudgetExceededError):
        projection_pairs(sierpinski(L), Grid.regular(8, ndim=2), 8, [0.5, 0.5], budget=1000)


def test_projection_matches_explicit_enumeration():
    L = 8
    greys = (GreyLevelMap.identity(L), GreyLevelMap.half_scale(L), GreyLevelMap((0, 1, 2, 3, 4, 5, 6, 6, 6)))
    SF = sierpinski(L, greys)
    g = Grid.regular(32, ndim=2)
    seed = [0.5, 0.5]
    N = 4
    idx, levels, _ = projection_pairs(SF, g, N, seed)
    got = merge_by_max(g, L, idx, levels)
    explicit = np.zeros(g.dims, dtype=np.int64)
    for a in all_addresses(3, N):
        p = g.snap(project(SF.maps, a, seed)[None, :])[0]
        explicit[tuple(p)] = max(explicit[tuple(p)], grey_limit(SF.greys, a).level)
    assert np.array_equal(got.values, explicit)


def test_merge_order_independent():
    g = Grid.regular(16, ndim=2)
    rng = np.random.default_rng(5)
    idx = rng.integers(0, 17, (200, 2))
    vals = rng.integers(0, 9, 200)
    perm = rng.permutation(200)
    assert merge_by_max(g, 8, idx, vals) == merge_by_max(g, 8, idx[perm], vals[perm])


def test_halving_projection_is_chi0():
    g = Grid.regular(1024)
    SF = FuzzyIFS((halving_map(),), GreySystem((GreyLevelMap.identity(16),)))
    pa = attractor_via_projection(SF, g, 12, seed=[1.0])
    assert pa.u == CompactFuzzySet.dirac(g, 16, [0.0])


def test_sierpinski_projection_levels():
    g = Grid.regular(64, ndim=2)
    pa = attractor_via_projection(sierpinski(4), g, 6)
    assert pa.addresses == 3**6
    assert set(np.unique(pa.u.values)) <= {0, 4}
    assert pa.grey_residual == 0


def test_depth_for_resolution():
    assert depth_for_resolution(0.5, 1.0, 1 / 1024) == 10
    with pytest.raises(ValueError):
        depth_for_resolution(1.0, 1.0, 0.1)
