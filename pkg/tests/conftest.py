import numpy as np
import pytest
from hypothesis import settings, strategies as st

from fuzzyifs.fuzzy_core import CompactFuzzySet, FuzzySet, GreyLevelMap, GreySystem, Grid
from fuzzyifs.ifs_engine import FuzzyIFS, affine

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- hypothesis strategies -------------------------------------------------


@st.composite
def grids(draw, ndim=None, max_cells=7):
    n = draw(st.integers(1, 2)) if ndim is None else ndim
    cells = [draw(st.integers(1, max_cells)) for _ in range(n)]
    return Grid.regular(cells, ndim=n)


@st.composite
def fuzzy_sets(draw, grid=None, levels=None, compact=True, ndim=None, max_cells=7):
    g = draw(grids(ndim=ndim, max_cells=max_cells)) if grid is None else grid
    L = draw(st.integers(1, 6)) if levels is None else levels
    vals = draw(st.lists(st.integers(0, L), min_size=g.size, max_size=g.size))
    vals = np.array(vals, dtype=np.int64).reshape(g.dims)
    if compact:
        vals.reshape(-1)[draw(st.integers(0, g.size - 1))] = L
        return CompactFuzzySet(g, L, vals)
    return FuzzySet(g, L, vals)


@st.composite
def grey_tables(draw, levels, top=None):
    steps = draw(st.lists(st.integers(0, 2), min_size=levels, max_size=levels))
    table = [0]
    for s in steps:
        table.append(min(levels, table[-1] + s))
    if top is not None:
        table[-1] = top
        table = [min(t, top) for t in table]
    return GreyLevelMap(tuple(table))


@st.composite
def grey_systems(draw, levels, k):
    maps = [draw(grey_tables(levels)) for _ in range(k)]
    j = draw(st.integers(0, k - 1))
    t = list(maps[j].table)
    t[-1] = levels
    maps[j] = GreyLevelMap(tuple(t))
    return GreySystem(tuple(maps))


def random_contraction(rng, ndim, max_scale=0.6):
    """Affine map of the unit box into itself with operator norm <= max_scale."""
    A = rng.uniform(-1, 1, (ndim, ndim))
    A *= rng.uniform(0.1, max_scale) / max(np.linalg.norm(A, 2), 1e-12)
    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * ndim, indexing="ij")).reshape(ndim, -1).T
    img = corners @ A.T
    lo, hi = img.min(axis=0), img.max(axis=0)
    b = rng.uniform(-lo, 1 - hi)
    return affine(A, b)


def random_system(rng, ndim, levels, k=None):
    k = k or int(rng.integers(1, 4))
    maps = tuple(random_contraction(rng, ndim) for _ in range(k))
    tables = []
    for _ in range(k):
        t = np.sort(rng.integers(0, levels + 1, levels))
        tables.append(GreyLevelMap((0, *t.tolist())))
    j = int(rng.integers(k))
    t = list(tables[j].table)
    t[-1] = levels
    tables[j] = GreyLevelMap(tuple(t))
    return FuzzyIFS(maps, GreySystem(tuple(tables)))


def random_fuzzy(rng, grid, levels, density=0.3):
    vals = rng.integers(1, levels + 1, grid.dims) * (rng.random(grid.dims) < density)
    vals.reshape(-1)[rng.integers(grid.size)] = levels
    return CompactFuzzySet(grid, levels, vals)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
