"""Compute the bundled attractors and write FZY1 + PGM files.

    python scripts/render_attractors.py --out renders --grid 128
"""
import argparse
from pathlib import Path

from fuzzyifs.cli import RunConfig, cmd_attract

ROOT = Path(__file__).resolve().parent.parent
SYSTEMS = ("halving", "sierpinski", "sierpinski_grey")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="renders")
    p.add_argument("--grid", type=int, default=None, help="override the cell count per axis")
    p.add_argument("--method", choices=("iterate", "projection"), default="iterate")
    p.add_argument("--depth", type=int, default=None)
    args = p.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in SYSTEMS:
        cfg = RunConfig(
            ROOT / "configs" / f"{name}.ifs",
            grid=args.grid,
            method=args.method,
            depth=args.depth,
            out=out / (name if args.grid is None else f"{name}_{args.grid}"),
        )
        cmd_attract(cfg)


if __name__ == "__main__":
    main()
