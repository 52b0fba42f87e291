import numpy as np
import pytest
from hypothesis import given

from conftest import fuzzy_sets
from fuzzyifs.formats import (
    FormatError,
    dumps_fzy,
    dumps_pgm,
    dumps_system,
    loads_fzy,
    loads_pgm,
    loads_system,
    pixel_values,
    with_overrides,
)
from fuzzyifs.fuzzy_core import CompactFuzzySet, FuzzySet, Grid

SIERPINSKI = """\
# comment line
grid 16 16
domain 0 0 1 1
levels 4
map 0.5 0 0 0.5 0 0
grey 0 1 2 3 4
map 0.5 0 0 0.5 0.5 0   # trailing comment
grey 0 1 2 3 4
map 0.5 0 0 0.5 0 0.5
grey 0 0 1 1 2
"""


@given(fuzzy_sets(compact=False))
def test_fzy_round_trip(u):
    text = dumps_fzy(u)
    v = loads_fzy(text)
    assert v == u and dumps_fzy(v) == text


def test_fzy_layout():
    g = Grid.regular([1, 2], ndim=2)
    u = FuzzySet(g, 3, np.array([[0, 1, 2], [3, 0, 0]]))
    assert dumps_fzy(u) == "FZY1\n2 3 3\n0.0 0.0 1.0 1.0\n0 1 2\n3 0 0\n"


def test_fzy_rejects_garbage():
    for bad in ("", "FZY2\n", "FZY1\n3 2\n0.0 -1.0\n0 1 2\n", "FZY1\n3 2\n0.0 1.0\n0 1 3\n", "FZY1\n3 2\n0.0 1.0\n0 1\n"):
        with pytest.raises(FormatError):
            loads_fzy(bad)


def test_pgm_pixels():
    g = Grid.regular(4)
    L = 16
    chi = CompactFuzzySet.dirac(g, L, [0.5])
    assert pixel_values(chi).tolist() == [[0, 0, 255, 0, 0]]
    assert np.all(pixel_values(CompactFuzzySet.full(g, L)) == 255)
    # round(255 j / L) with halves rounding up
    u = FuzzySet(Grid.regular(1), 2, np.array([1, 2]))
    assert pixel_values(u).tolist() == [[128, 255]]


def test_pgm_orientation_and_wrap():
    g = Grid.regular([2, 1], ndim=2)  # 3 x 2 points
    u = FuzzySet(g, 1, np.array([[0, 1], [0, 0], [1, 0]]))
    assert pixel_values(u).tolist() == [[255, 0, 0], [0, 0, 255]]  # top row is y = 1
    wide = CompactFuzzySet.full(Grid.regular(99), 1)
    text = dumps_pgm(wide)
    assert max(len(line) for line in text.splitlines()) <= 70
    assert loads_pgm(text).shape == (1, 100)


def test_system_round_trip():
    cfg = loads_system(SIERPINSKI)
    assert cfg.grid.cells == (16, 16) and cfg.levels == 4 and cfg.system.k == 3
    again = loads_system(dumps_system(cfg))
    assert again.grid == cfg.grid
    assert again.system.maps == cfg.system.maps and again.system.greys == cfg.system.greys
    assert dumps_system(again) == dumps_system(cfg)


def test_system_defaults_to_unit_box():
    cfg = loads_system("grid 8\nlevels 2\nmap 0.5 0\ngrey 0 1 2\n")
    assert cfg.grid.origin == (0.0,) and cfg.grid.extent == (1.0,)


@pytest.mark.parametrize(
    "text,needle",
    [
        ("grid 8\nlevels 2\nmap 0.5 0\ngrey 1 1 2\n", "line 4: grey table violates ϱ(0)=0"),
        ("grid 8\nlevels 2\nmap 0.5 0\ngrey 0 1 1\n", "ϱ_j(1)=1"),
        ("grid 8\nlevels 2\nmap 0.5 0\ngrey 0 2 1\n", "line 4"),
        ("grid 8\nlevels 2\nmap 0.5\ngrey 0 1 2\n", "line 3"),
        ("grid 8\nlevels 2\nmap 0.5 0\ngrey 0 1\n", "line 4"),
        ("grid 8\nlevels 2\nmap 0.5 0\nbogus 1\n", "line 4: unknown directive"),
        ("grid 8\nlevels 2\nmap 0.5 0\nmap 0.5 0\n", "line 4"),
        ("levels 2\nmap 0.5 0\n", "line 2"),
        ("grid 8\nlevels 2\n", "no maps"),
        ("grid 8\nlevels x\n", "line 2"),
    ],
)
def test_system_errors(text, needle):
    with pytest.raises(FormatError) as exc:
        loads_system(text)
    assert needle in str(exc.value)


def test_overrides():
    cfg = loads_system(SIERPINSKI)
    big = with_overrides(cfg, cells=32, levels=8)
    assert big.grid.cells == (32, 32)
    assert big.levels == 8
    assert big.system.greys[0].table == tuple(range(9))
    assert big.system.greys[2].table == (0, 0, 0, 1, 2, 2, 2, 3, 4)
    assert with_overrides(cfg) == cfg
