"""Command-line interface: ``fuzzyifs <command> ...``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import formats
from .codespace import (
    Address,
    BudgetExceededError,
    all_addresses,
    attractor_via_projection,
    grey_limit,
    project,
)
from .experiments import EXPERIMENTS, fmt
from .fuzzy_core import CompactFuzzySet, GridEscapeError
from .ifs_engine import (
    NoInvariantBoxError,
    NotConvergedError,
    box_indices,
    fiber_diameter,
    fuzzy_hutchinson,
    invariant_box,
    iterate_to_fixpoint,
    sample_edelstein,
    verify_matkowski,
)
from .metrics import (
    PseudometricFamily,
    directed_closure,
    distance,
    parse_metric,
    parse_pseudometric,
    proj,
)


class CLIError(Exception):
    pass


@dataclass
class RunConfig:
    system: Path
    grid: int | None = None
    levels: int | None = None
    method: str = "iterate"
    tol: float = 1e-9
    max_iter: int = 1000
    depth: int | None = None
    out: Path = Path("attractor")
    metric: str = "dhf euclid"
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("iterate", "projection"):
            raise CLIError(f"unknown method {self.method!r}")
        if self.method == "projection" and self.depth is None:
            raise CLIError("--method projection requires --depth")
        if self.method == "iterate" and not self.tol > 0:
            raise CLIError("--tol must be positive")


def _load(cfg: RunConfig) -> formats.SystemConfig:
    return formats.with_overrides(formats.load_system(cfg.system), cfg.grid, cfg.levels)


def working_box(SF, grid):
    """The whole domain when it is invariant, else the box grown from its centre."""
    try:
        return invariant_box(SF.maps, grid, grid.lo, grid.hi)
    except NoInvariantBoxError:
        return invariant_box(SF.maps, grid, (grid.lo + grid.hi) / 2)


def cmd_attract(cfg: RunConfig) -> int:
    sc = _load(cfg)
    grid, SF = sc.grid, sc.system
    name, d = parse_metric(cfg.metric)
    box = working_box(SF, grid)
    lines = [
        "# params",
        f"# system: {cfg.system}",
        f"# grid: {' '.join(map(str, grid.cells))}",
        f"# levels: {SF.levels}",
        f"# method: {cfg.method}",
        f"# metric: {name} {d.name}",
        f"# invariant box: {box[0].tolist()}..{box[1].tolist()}",
    ]
    if cfg.method == "iterate":
        u0 = CompactFuzzySet.from_points(grid, SF.levels, box_indices(grid, *box)).as_compact()
        res = iterate_to_fixpoint(SF, u0, name, d, cfg.tol, cfg.max_iter)
        u = res.u
        lines.append(f"# tol: {fmt(res.tol)}")
        lines.append("step\t" + name + "\tdh")
        lines += [f"{i}\t{fmt(a)}\t{fmt(b)}" for i, (a, b) in enumerate(zip(res.trace, res.trace_dh))]
    else:
        pa = attractor_via_projection(SF, grid, cfg.depth, box=box)
        u = pa.u
        lines += [
            f"# depth: {pa.depth}",
            f"# addresses: {pa.addresses}",
            f"# spatial truncation bound: {fmt(pa.spatial_error)}",
            f"# grey residual level: {pa.grey_residual}",
        ]
    cert = distance(name, d, fuzzy_hutchinson(SF, u), u)
    lines.append(f"CERTIFICATE: {name}(S_F(u*), u*) = {fmt(cert)}")
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    formats.save_fzy(u, out.with_suffix(".fzy"))
    formats.save_pgm(u, out.with_suffix(".pgm"))
    out.with_suffix(".report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    return 0


def cmd_distance(file_u, file_v, metric: str) -> str:
    u, v = formats.load_fzy(file_u), formats.load_fzy(file_v)
    if u.grid != v.grid or u.levels != v.levels:
        raise CLIError("fuzzy sets live on different grids or level counts")
    name, d = parse_metric(metric)
    return fmt(distance(name, d, u, v))


def cmd_verify(system, samples: int, seed: int, metric: str = "euclid", depth: int = 8) -> tuple[str, bool]:
    sc = formats.load_system(system)
    grid, SF = sc.grid, sc.system
    d = parse_pseudometric(metric.split()[-1])
    ok = True
    out = [f"# verify {system}", f"# pseudometric: {d.name}", f"# samples: {samples}", f"# seed: {seed}"]
    out.append("grey system: admissible (all tables nondecreasing with ϱ(0)=0; some ϱ_j(1)=1)")
    try:
        box = working_box(SF, grid)
        lo, hi = grid.coords(box[0])[0], grid.coords(box[1])[0]
        out.append(f"invariant box: {' '.join(map(fmt, lo))} .. {' '.join(map(fmt, hi))}")
    except NoInvariantBoxError as exc:
        out.append(f"invariant box: FAIL {exc}")
        return "\n".join(out), False
    out.append("map\twitness\tviolations\tworst_slack\tedelstein_violations")
    for i, f in enumerate(SF.maps, start=1):
        phi = f.witness(d)
        edel = sample_edelstein(f, d, samples, seed, (lo, hi))
        if phi is None:
            out.append(f"{i}\tnone\t-\t-\t{edel}")
            ok = False
            continue
        rep = verify_matkowski(f, d, phi, samples, seed, (lo, hi))
        wname = f"linear({fmt(phi.c)})" if phi.kind == "linear" else phi.kind
        out.append(f"{i}\t{wname}\t{rep.violations}\t{fmt(rep.worst_slack)}\t{edel}")
        ok &= rep.ok
    out.append("depth\tmax_fiber_diameter")
    for n in range(depth + 1):
        if SF.k**n > 4096:
            break
        diam = max(fiber_diameter(SF.maps, a.symbols, grid, box, d) for a in all_addresses(SF.k, n))
        out.append(f"{n}\t{fmt(diam)}")
    out.append(f"VERDICT: {'PASS' if ok else 'FAIL'}")
    return "\n".join(out), ok


def cmd_render(fzy, pgm) -> None:
    formats.save_pgm(formats.load_fzy(fzy), pgm)


def cmd_project(system, depth: int, address: str | None = None, seed_point=None) -> str:
    sc = formats.load_system(system)
    grid, SF = sc.grid, sc.system
    seed = (grid.lo + grid.hi) / 2 if seed_point is None else np.asarray(seed_point, dtype=float)
    addrs = [Address.parse(address, SF.k)] if address else list(all_addresses(SF.k, depth))
    lines = []
    for a in addrs:
        p = project(SF.maps, a, seed, grid)
        lv = grey_limit(SF.greys, a).level
        lines.append(f"{a} → {' '.join(map(fmt, p))} {lv}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fuzzyifs", description="Fuzzy iterated function systems on grids.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("attract", help="compute a fuzzy attractor")
    a.add_argument("system")
    a.add_argument("--grid", type=int)
    a.add_argument("--levels", type=int)
    a.add_argument("--method", choices=("iterate", "projection"), default="iterate")
    a.add_argument(
        "--tol", type=float, default=1e-9,
        help="stop once one more step moves at most this much (default: below print resolution, so exact)",
    )
    a.add_argument("--max-iter", type=int, default=1000)
    a.add_argument("--depth", type=int)
    a.add_argument("--metric", default="dhf euclid")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", default="attractor")

    d = sub.add_parser("distance", help="distance between two FZY1 files")
    d.add_argument("u")
    d.add_argument("v")
    d.add_argument("name", nargs="?", default=None, help="dhf, dh, dh0, dinf or hausdorff")
    d.add_argument("pseudometric", nargs="?", default=None, help="euclid, proj:<axis> or wmax:<w1,...>")
    d.add_argument("--metric", default=None, help='e.g. "dhf euclid"')

    v = sub.add_parser("verify", help="sampled contraction and admissibility checks")
    v.add_argument("system")
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--metric", default="euclid")
    v.add_argument("--depth", type=int, default=8)

    r = sub.add_parser("render", help="FZY1 -> P2 PGM")
    r.add_argument("fzy")
    r.add_argument("pgm")

    pr = sub.add_parser("project", help="code-space projection of addresses")
    pr.add_argument("system")
    pr.add_argument("--depth", type=int, default=3)
    pr.add_argument("--address", help="comma- or space-separated symbols 1..k")

    e = sub.add_parser("experiment", help="run a named experiment report")
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    e.add_argument("--grid", type=int)
    e.add_argument("--levels", type=int)
    e.add_argument("--metric", default="euclid")
    e.add_argument("--max-subset", type=int, default=2, help="directed-closure cap (multimetric)")
    e.add_argument("--out")
    return p


def _experiment(args) -> tuple[str, bool]:
    fn = EXPERIMENTS[args.name]
    kw = {}
    if args.grid is not None:
        kw["cells"] = args.grid
    if args.levels is not None:
        kw["levels"] = args.levels
    if args.name == "multimetric":
        base = PseudometricFamily(tuple(proj(a) for a in range(2)))
        kw["family_b"] = directed_closure(base, args.max_subset)
    else:
        kw["d"] = parse_pseudometric(args.metric.split()[-1])
    rep = fn(**kw)
    return rep.to_text(), rep.passed


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "attract":
            cfg = RunConfig(
                Path(args.system), args.grid, args.levels, args.method, args.tol,
                args.max_iter, args.depth, Path(args.out), args.metric, args.seed,
            )
            return cmd_attract(cfg)
        if args.command == "distance":
            metric = args.metric or " ".join(x for x in (args.name or "dhf", args.pseudometric) if x)
            print(cmd_distance(args.u, args.v, metric))
            return 0
        if args.command == "verify":
            text, ok = cmd_verify(args.system, args.samples, args.seed, args.metric, args.depth)
            print(text)
            return 0 if ok else 1
        if args.command == "render":
            cmd_render(args.fzy, args.pgm)
            return 0
        if args.command == "project":
            print(cmd_project(args.system, args.depth, args.address))
            return 0
        if args.command == "experiment":
            text, ok = _experiment(args)
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            print(text, end="")
            return 0 if ok else 1
    except NotConvergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("trace: " + " ".join(map(fmt, exc.trace)), file=sys.stderr)
        return 2
    except (CLIError, formats.FormatError, BudgetExceededError, GridEscapeError,
            NoInvariantBoxError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
