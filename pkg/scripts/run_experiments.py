"""Run every named experiment and write its report to a directory.

    python scripts/run_experiments.py --out reports
"""
import argparse
import sys
from pathlib import Path

from fuzzyifs.experiments import EXPERIMENTS


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="reports")
    args = p.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for name, fn in sorted(EXPERIMENTS.items()):
        rep = fn()
        (out / f"{name}.txt").write_text(rep.to_text(), encoding="utf-8")
        print(f"{'PASS' if rep.passed else 'FAIL'}  {name}")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
