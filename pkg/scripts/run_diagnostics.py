#!/usr/bin/env python3
"""Convergence diagnostics for the classical-limit correction series.

Writes the two convergence criteria ('supremum' and 'difference') over a
temperature grid and prints the temperature where each crosses 1 — the
threshold below which the truncated series should not be trusted.  For the
s = 1/2 ferromagnetic dimer at J = g mu_B Bz the supremum criterion crosses
near 1.01 K; for a strongly coupled s = 2 system (J = 100 g mu_B Bz) the
difference criterion crosses near 200 K.

Example:
  python3 scripts/run_diagnostics.py --s 2 --J-over-gmuBBz 100 --out diag.csv
"""

import argparse
import sys

from pisd import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--J-over-gmuBBz", type=float, default=1.0)
    ap.add_argument("--Bz", type=float, default=1.0)
    ap.add_argument("--Tmin", type=float, default=0.1)
    ap.add_argument("--Tmax", type=float, default=1000.0)
    ap.add_argument("--points", type=int, default=40)
    ap.add_argument("--out", default="diagnostics.csv")
    args = ap.parse_args()

    return cli.run([
        "diagnose", "--s", str(args.s),
        "--J-over-gmuBBz", str(getattr(args, "J_over_gmuBBz")),
        "--Bz", str(args.Bz), "--Tmin", str(args.Tmin), "--Tmax", str(args.Tmax),
        "--points", str(args.points), "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
