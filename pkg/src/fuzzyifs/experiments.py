"""Reproducible numeric reports for the convergence and non-convergence examples.

Every report carries a raw distance table and verdict lines.  Verdicts are
computed from the table values as printed (9 decimals), so re-parsing a
report and re-running its checks gives the same verdicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .fuzzy_core import CompactFuzzySet, FuzzySet, Grid, GreyLevelMap, GreySystem, quantize
from .ifs_engine import FuzzyIFS, affine, fuzzy_hutchinson, halving_map
from .metrics import (
    Pseudometric,
    PseudometricFamily,
    directed_closure,
    euclid,
    fuzzy_hausdorff,
    hypo0_distance,
    hypo_distance,
    linf_distance,
    pointwise_gap,
    proj,
)

COLUMNS = ("dhf", "dh", "dh0", "dinf")
EPS = 1e-9  # one unit in the last printed digit


def fmt(x: float) -> str:
    return f"{x:.9f}"


def printed(x: float) -> float:
    return float(fmt(x))


@dataclass
class Verdict:
    passed: bool
    claim: str
    measured: str

    def line(self) -> str:
        return f"VERDICT: {'PASS' if self.passed else 'FAIL'} {self.claim} | {self.measured}"


@dataclass
class ExperimentReport:
    name: str
    params: dict
    rows: list[tuple[int, dict]] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add_row(self, n: int, **dists):
        self.rows.append((n, {k: printed(v) for k, v in dists.items()}))

    def column(self, key: str) -> np.ndarray:
        return np.array([r[key] for _, r in self.rows])

    @property
    def ns(self) -> list[int]:
        return [n for n, _ in self.rows]

    def check(self, passed: bool, claim: str, measured: str):
        self.verdicts.append(Verdict(bool(passed), claim, measured))

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_text(self) -> str:
        out = ["# params", f"# experiment: {self.name}"]
        out += [f"# {k}: {v}" for k, v in self.params.items()]
        out += [f"# note: {s}" for s in self.notes]
        out.append("\t".join(("n",) + COLUMNS))
        for n, r in self.rows:
            out.append("\t".join([str(n)] + [fmt(r[c]) for c in COLUMNS]))
        out += [v.line() for v in self.verdicts]
        return "\n".join(out) + "\n"


def parse_report_table(text: str) -> list[tuple[int, dict]]:
    rows = []
    for line in text.splitlines():
        if not line or line.startswith(("#", "VERDICT:", "n\t")):
            continue
        n, *vals = line.split("\t")
        rows.append((int(n), dict(zip(COLUMNS, map(float, vals)))))
    return rows


def _all_distances(d: Pseudometric, u: FuzzySet, v: FuzzySet) -> dict:
    return dict(
        dhf=fuzzy_hausdorff(d, u, v),
        dh=hypo_distance(d, u, v),
        dh0=hypo0_distance(d, u, v),
        dinf=linf_distance(u, v),
    )


# --------------------------------------------------------------------------
# sequences


def ramp_sequence(grid: Grid, levels: int, n: int) -> CompactFuzzySet:
    """u_n(x) = 1 - x on [0, 1/n] and 1 - 1/n beyond, along the first axis."""
    x = grid.coords(grid.all_indices())[:, 0].reshape(grid.dims)
    alpha = np.where(x <= 1.0 / n + EPS, 1.0 - x, 1.0 - 1.0 / n)
    return CompactFuzzySet(grid, levels, quantize(alpha, levels))


def dirac_pair(grid: Grid, levels: int, a, b, n: int) -> FuzzySet:
    """chi_a + (1/n) chi_b with the 1/n level quantized downward."""
    ia = grid.snap(np.reshape(a, (1, -1)))
    ib = grid.snap(np.reshape(b, (1, -1)))
    values = np.zeros(grid.dims, dtype=np.int64)
    values[tuple(ib[0])] = quantize(1.0 / n, levels)
    values[tuple(ia[0])] = levels
    return CompactFuzzySet(grid, levels, values)


def halving_system(levels: int, ndim: int = 1) -> FuzzyIFS:
    f = halving_map() if ndim == 1 else affine(np.eye(ndim) / 2, np.zeros(ndim))
    return FuzzyIFS((f,), GreySystem((GreyLevelMap.identity(levels),)))


def halving_iterates(grid: Grid, levels: int, n_max: int) -> Iterator[tuple[int, CompactFuzzySet]]:
    """Iterates of x -> x/2 started at the Dirac set at the far corner."""
    SF = halving_system(levels, grid.ndim)
    u = CompactFuzzySet.dirac(grid, levels, grid.hi)
    for n in range(1, n_max + 1):
        u = fuzzy_hutchinson(SF, u)
        yield n, u


# --------------------------------------------------------------------------
# experiments


def exp_hypo_vs_dhf(cells: int = 64, levels: int = 16, n_list: Sequence[int] = (2, 4, 8, 16), d=None):
    """Ramp sequence: d_HF stays at 1 while d_h shrinks like 1/n."""
    d = d or euclid()
    grid = Grid.regular(cells)
    for n in n_list:
        if n < 1 or cells % n:
            raise ValueError(f"n={n} does not divide the grid of {cells} cells")
    u0 = CompactFuzzySet.full(grid, levels)
    rep = ExperimentReport(
        "hypo_vs_dhf", dict(grid=cells, levels=levels, pseudometric=d.name, n=list(n_list))
    )
    for n in n_list:
        rep.add_row(n, **_all_distances(d, ramp_sequence(grid, levels, n), u0))
    dhf, dh = rep.column("dhf"), rep.column("dh")
    cell = 1.0 / cells
    rep.check(np.all(dhf >= 1.0), "dhf(u_n,u_0) >= 1 for every n", f"min={fmt(dhf.min())}")
    bounds = np.array([1.0 / n + cell for n in rep.ns])
    rep.check(np.all(dh <= bounds + EPS), "dh(u_n,u_0) <= 1/n + cell", f"max excess={fmt((dh - bounds).max())}")
    if len(dh) > 1:
        rep.check(np.all(np.diff(dh) < 0), "dh(u_n,u_0) strictly decreasing in n", "dh=" + ",".join(map(fmt, dh)))
    return rep


def exp_dirac_pair(a=0.0, b=1.0, n_list: Sequence[int] = (2, 4, 8, 16), cells: int = 64, levels: int = 16, d=None):
    """chi_a + (1/n) chi_b against chi_a."""
    d = d or euclid()
    grid = Grid.regular(cells)
    ia, ib = grid.snap(np.reshape(a, (1, -1))), grid.snap(np.reshape(b, (1, -1)))
    if np.array_equal(ia, ib):
        raise ValueError("a and b snap to the same grid point")
    dab = d(grid.coords(ia)[0], grid.coords(ib)[0])
    chi_a = CompactFuzzySet.from_points(grid, levels, ia).as_compact()
    rep = ExperimentReport(
        "dirac_pair",
        dict(grid=cells, levels=levels, pseudometric=d.name, a=float(grid.coords(ia)[0][0]),
             b=float(grid.coords(ib)[0][0]), n=list(n_list)),
    )
    live, floor = [], []
    for n in n_list:
        u = dirac_pair(grid, levels, a, b, n)
        rep.add_row(n, **_all_distances(d, u, chi_a))
        (live if quantize(1.0 / n, levels) >= 1 else floor).append(len(rep.rows) - 1)
    dab_p = printed(dab)
    if live:
        r = [rep.rows[i] for i in live]
        q = np.array([quantize(1.0 / n, levels) / levels for n, _ in r])
        dinf = np.array([x["dinf"] for _, x in r])
        dh0 = np.array([x["dh0"] for _, x in r])
        dh = np.array([x["dh"] for _, x in r])
        dhf = np.array([x["dhf"] for _, x in r])
        inv_n = np.array([1.0 / n for n, _ in r])
        rep.check(np.all(np.abs(dinf - q) <= EPS), "dinf = quantized 1/n", "dinf=" + ",".join(map(fmt, dinf)))
        rep.check(np.all(dh0 <= inv_n + EPS), "dh0 <= 1/n", "dh0=" + ",".join(map(fmt, dh0)))
        rep.check(np.all(np.abs(dh - dab_p) <= EPS), f"dh = d(a,b) = {fmt(dab)} for every n", "dh=" + ",".join(map(fmt, dh)))
        rep.check(np.all(np.abs(dhf - dab_p) <= EPS), f"dhf = d(a,b) = {fmt(dab)} for every n", "dhf=" + ",".join(map(fmt, dhf)))
    if floor:
        zero = all(max(rep.rows[i][1].values()) == 0 for i in floor)
        ns = ",".join(str(rep.rows[i][0]) for i in floor)
        rep.notes.append(f"quantization floor: 1/n < 1/L for n in {ns}; the perturbation rounds to 0")
        rep.check(zero, "quantization floor: all distances 0 when 1/n < 1/L", f"n={ns}")
    return rep


def exp_halving(n_max: int = 12, cells: int = 1024, levels: int = 16, d=None):
    """Iterates of x -> x/2 from chi_1: Dirac sets marching to 0."""
    d = d or euclid()
    grid = Grid.regular(cells)
    chi0 = CompactFuzzySet.dirac(grid, levels, [0.0])
    rep = ExperimentReport("halving", dict(grid=cells, levels=levels, pseudometric=d.name, n_max=n_max))
    dirac_ok, gaps_moving, gaps_origin, targets = True, [], [], []
    for n, u in halving_iterates(grid, levels, n_max):
        target = CompactFuzzySet.dirac(grid, levels, [0.5**n])
        dirac_ok &= u == target
        pos = target.support()[0]
        targets.append(grid.coords(pos)[0][0])
        rep.add_row(n, **_all_distances(d, u, chi0))
        if pos[0] != 0:
            gaps_moving.append(pointwise_gap(u, chi0, pos))
            gaps_origin.append(pointwise_gap(u, chi0, [0]))
    dhf = rep.column("dhf")
    snapped = np.array([printed(t) for t in targets])
    rep.check(dirac_ok, "n-th iterate is the Dirac set at the cell nearest 1/2^n", f"positions={','.join(map(fmt, snapped))}")
    rep.check(np.all(np.abs(dhf - snapped) <= EPS), "dhf(S^n u, chi_0) = snapped 1/2^n", "dhf=" + ",".join(map(fmt, dhf)))
    half = [abs(dhf[i + 1] - dhf[i] / 2) for i in range(len(dhf) - 1) if dhf[i] > 0]
    rep.check(all(h <= 1.0 / cells + EPS for h in half), "dhf halves each step within one cell", f"max deviation={fmt(max(half, default=0.0))}")
    rep.check(all(g == 1.0 for g in gaps_moving), "pointwise gap at the moving point stays 1", f"{len(gaps_moving)} iterates off the origin")
    rep.check(all(g == 1.0 for g in gaps_origin), "pointwise gap at 0 stays 1 before the grid floor", f"{len(gaps_origin)} iterates off the origin")
    if n_max > np.log2(cells):
        rep.check(dhf[-1] == 0.0, "past log2(grid) the iterate snaps to chi_0", f"dhf={fmt(dhf[-1])}")
    return rep


SequenceFamily = Callable[[], tuple[list[tuple[int, FuzzySet]], FuzzySet]]


def plane_sequences(cells: int = 32, levels: int = 16, n_list=(2, 4, 8, 16), n_max: int = 8) -> dict:
    """The three sequence families on the unit square, each with its candidate limit."""
    grid = Grid.regular(cells, ndim=2)
    full = CompactFuzzySet.full(grid, levels)
    corner = CompactFuzzySet.dirac(grid, levels, [0.0, 0.0])
    return {
        "constant": ([(n, corner) for n in n_list], corner),
        "ramp": ([(n, ramp_sequence(grid, levels, n)) for n in n_list], full),
        "halving": (list(halving_iterates(grid, levels, n_max)), corner),
    }


def convergence_verdict(dists: Sequence[float], conv_tol: float, div_floor: float) -> str:
    if dists[-1] <= conv_tol:
        return "converges"
    if min(dists) >= div_floor:
        return "diverges"
    return "undecided"


def exp_multimetric_agreement(
    family_a: PseudometricFamily | None = None,
    family_b: PseudometricFamily | None = None,
    sequences: dict | None = None,
    cells: int = 32,
    levels: int = 16,
    div_floor: float = 0.5,
):
    """Do two families generating the same topology agree on which sequences converge?"""
    family_a = family_a or PseudometricFamily((euclid(),))
    family_b = family_b or directed_closure(PseudometricFamily((proj(0), proj(1))), 2)
    sequences = sequences or plane_sequences(cells, levels)
    conv_tol = 1e-12
    rep = ExperimentReport(
        "multimetric_agreement",
        dict(
            family_a="{" + ", ".join(m.name for m in family_a) + "}",
            family_b="{" + ", ".join(m.name for m in family_b) + "}",
            grid=cells,
            levels=levels,
            divergence_floor=div_floor,
        ),
    )
    for name, (seq, limit) in sequences.items():
        da = [max(fuzzy_hausdorff(m, u, limit) for m in family_a) for _, u in seq]
        db = [max(fuzzy_hausdorff(m, u, limit) for m in family_b) for _, u in seq]
        da = [printed(x) for x in da]
        db = [printed(x) for x in db]
        va = convergence_verdict(da, conv_tol, div_floor)
        vb = convergence_verdict(db, conv_tol, div_floor)
        rep.notes.append(f"{name}: A " + ",".join(map(fmt, da)) + " | B " + ",".join(map(fmt, db)))
        rep.check(va == vb and va != "undecided", f"{name}: verdicts agree", f"A {va}, B {vb}")
    return rep


EXPERIMENTS = {
    "hypo_vs_dhf": exp_hypo_vs_dhf,
    "dirac_pair": exp_dirac_pair,
    "halving": exp_halving,
    "multimetric": exp_multimetric_agreement,
}
