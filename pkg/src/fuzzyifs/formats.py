"""Text formats: FZY1 fuzzy sets, P2 grayscale images, fuzzy IFS system files.

FZY1::

    FZY1
    <points per axis...> <L>
    <origin...> <extent...>
    <levels, row-major, one line per last-axis run>

System file, one directive per line (``#`` starts a comment)::

    grid <cells per axis...>
    domain <origin...> <extent...>
    levels <L>
    map <a11 a12 a21 a22 b1 b2>      # 2-d; a 1-d map is "map a b"
    grey <g0 g1 ... gL>
    ...                              # one map/grey pair per branch
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fuzzy_core import FuzzySet, Grid, GreyLevelMap, GreySystem
from .ifs_engine import ContractionMap, FuzzyIFS


class FormatError(ValueError):
    pass


def _num(x: float) -> str:
    return repr(float(x))


# --------------------------------------------------------------------------
# FZY1


def dumps_fzy(u: FuzzySet) -> str:
    g = u.grid
    lines = ["FZY1", " ".join(map(str, g.dims)) + f" {u.levels}"]
    lines.append(" ".join(_num(x) for x in g.origin + g.extent))
    rows = u.values.reshape(-1, g.dims[-1])
    lines += [" ".join(map(str, r)) for r in rows.tolist()]
    return "\n".join(lines) + "\n"


def loads_fzy(text: str) -> FuzzySet:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "FZY1":
        raise FormatError("not an FZY1 file: first line must be 'FZY1'")
    try:
        head = [int(t) for t in lines[1].split()]
        box = [float(t) for t in lines[2].split()]
    except (IndexError, ValueError) as exc:
        raise FormatError(f"bad FZY1 header: {exc}") from None
    dims, L = tuple(head[:-1]), head[-1]
    if len(box) != 2 * len(dims):
        raise FormatError(f"line 3: expected {2 * len(dims)} numbers, got {len(box)}")
    try:
        grid = Grid(dims, tuple(box[: len(dims)]), tuple(box[len(dims) :]))
        vals = np.array(" ".join(lines[3:]).split(), dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"bad FZY1 grid or level data: {exc}") from None
    if vals.size != grid.size:
        raise FormatError(f"expected {grid.size} levels, found {vals.size}")
    try:
        return FuzzySet(grid, L, vals.reshape(dims))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def save_fzy(u: FuzzySet, path) -> None:
    Path(path).write_text(dumps_fzy(u), encoding="utf-8")


def load_fzy(path) -> FuzzySet:
    return loads_fzy(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# PGM (P2)


def pixel_values(u: FuzzySet) -> np.ndarray:
    """Image rows (top row = largest second coordinate) of round(255 level / L)."""
    L = u.levels
    px = (510 * u.values + L) // (2 * L)  # round half up, integer-exact
    if u.grid.ndim == 1:
        return px[None, :]
    if u.grid.ndim == 2:
        return px.T[::-1]
    raise ValueError("only 1-d and 2-d fuzzy sets can be rendered")


def dumps_pgm(u: FuzzySet, max_line: int = 70) -> str:
    img = pixel_values(u)
    h, w = img.shape
    out = ["P2", f"{w} {h}", "255"]
    for row in img.tolist():
        line = ""
        for v in map(str, row):
            if line and len(line) + 1 + len(v) > max_line:
                out.append(line)
                line = v
            else:
                line = f"{line} {v}" if line else v
        out.append(line)
    return "\n".join(out) + "\n"


def save_pgm(u: FuzzySet, path) -> None:
    Path(path).write_text(dumps_pgm(u), encoding="ascii")


def loads_pgm(text: str) -> np.ndarray:
    toks = [t for line in text.splitlines() for t in line.split("#")[0].split()]
    if not toks or toks[0] != "P2":
        raise FormatError("not a P2 PGM")
    w, h, maxval = int(toks[1]), int(toks[2]), int(toks[3])
    data = np.array(toks[4:], dtype=np.int64)
    if data.size != w * h or (data.size and data.max() > maxval):
        raise FormatError("PGM pixel data does not match header")
    return data.reshape(h, w)


# --------------------------------------------------------------------------
# system files


@dataclass(frozen=True)
class SystemConfig:
    grid: Grid
    system: FuzzyIFS

    @property
    def levels(self) -> int:
        return self.system.levels


def loads_system(text: str) -> SystemConfig:
    cells = origin = extent = None
    L = None
    maps: list[ContractionMap] = []
    greys: list[GreyLevelMap] = []
    grey_lines: list[int] = []

    def fail(n, msg):
        raise FormatError(f"line {n}: {msg}")

    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        try:
            if key == "grid":
                cells = [int(a) for a in args]
                if not cells or any(c < 1 for c in cells):
                    fail(n, "grid needs a positive cell count per axis")
            elif key == "domain":
                nums = [float(a) for a in args]
                if cells is None:
                    fail(n, "'domain' must follow 'grid'")
                if len(nums) != 2 * len(cells):
                    fail(n, f"domain needs {2 * len(cells)} numbers (origin then extent)")
                origin, extent = nums[: len(cells)], nums[len(cells) :]
            elif key == "levels":
                if len(args) != 1 or int(args[0]) < 1:
                    fail(n, "levels takes one positive integer")
                L = int(args[0])
            elif key == "map":
                if cells is None:
                    fail(n, "'map' must follow 'grid'")
                d = len(cells)
                nums = [float(a) for a in args]
                if len(nums) != d * d + d:
                    fail(n, f"a {d}-d map needs {d * d + d} numbers, got {len(nums)}")
                if len(maps) != len(greys):
                    fail(n, "every 'map' must be followed by its 'grey' line")
                maps.append(ContractionMap(np.reshape(nums[: d * d], (d, d)), nums[d * d :]))
            elif key == "grey":
                if L is None:
                    fail(n, "'grey' must follow 'levels'")
                if len(greys) + 1 != len(maps):
                    fail(n, "'grey' must follow a 'map' line")
                table = [int(a) for a in args]
                if len(table) != L + 1:
                    fail(n, f"grey table needs L+1 = {L + 1} entries, got {len(table)}")
                if table[0] != 0:
                    fail(n, f"grey table violates ϱ(0)=0: g0 = {table[0]}")
                if any(b < a for a, b in zip(table, table[1:])):
                    fail(n, "grey table must be nondecreasing")
                if any(t < 0 or t > L for t in table):
                    fail(n, f"grey entries must lie in 0..{L}")
                greys.append(GreyLevelMap(tuple(table)))
                grey_lines.append(n)
            else:
                fail(n, f"unknown directive {key!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            fail(n, str(exc))
    if cells is None or L is None:
        raise FormatError("system file needs 'grid' and 'levels'")
    if not maps:
        raise FormatError("system file defines no maps")
    if len(greys) != len(maps):
        raise FormatError(f"{len(maps)} maps but {len(greys)} grey tables")
    if not any(g.top == L for g in greys):
        raise FormatError(
            f"line {grey_lines[-1]}: admissibility requires some grey map with ϱ_j(1)=1 (gL = L)"
        )
    if origin is None:
        origin, extent = [0.0] * len(cells), [1.0] * len(cells)
    grid = Grid(tuple(c + 1 for c in cells), tuple(origin), tuple(extent))
    return SystemConfig(grid, FuzzyIFS(tuple(maps), GreySystem(tuple(greys))))


def dumps_system(cfg: SystemConfig) -> str:
    g = cfg.grid
    lines = [
        "grid " + " ".join(map(str, g.cells)),
        "domain " + " ".join(_num(x) for x in g.origin + g.extent),
        f"levels {cfg.levels}",
    ]
    for f, rho in zip(cfg.system.maps, cfg.system.greys):
        lines.append("map " + " ".join(_num(x) for x in list(f.matrix.reshape(-1)) + list(f.offset)))
        lines.append("grey " + " ".join(map(str, rho.table)))
    return "\n".join(lines) + "\n"


def load_system(path) -> SystemConfig:
    return loads_system(Path(path).read_text(encoding="utf-8"))


def with_overrides(cfg: SystemConfig, cells=None, levels=None) -> SystemConfig:
    """Replace the grid resolution and/or resample the grey tables to ``levels``."""
    grid = cfg.grid
    if cells is not None:
        cells = [cells] * grid.ndim if np.isscalar(cells) else list(cells)
        grid = Grid(tuple(c + 1 for c in cells), grid.origin, grid.extent)
    system = cfg.system
    if levels is not None and levels != system.levels:
        system = FuzzyIFS(system.maps, GreySystem(tuple(g.resample(levels) for g in system.greys)))
    return SystemConfig(grid, system)
