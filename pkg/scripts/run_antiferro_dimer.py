#!/usr/bin/env python3
"""Antiferromagnetic dimer (J = -2 g mu_B Bz) sweep: sLLG vs ED.

The quantum curve is non-monotonic in temperature (interior maximum) while
the bare classical model decays monotonically and fails at low temperature.
Uses the reduced antiferromagnetic time step dt = 7e-7 ns.

Produces, in --out-dir:
  ed_antiferro_s{s}.csv        exact-diagonalisation reference
  sweep_antiferro_s{s}.csv     exact-kernel (eigen-overlap) sLLG estimates
  classical_antiferro_s{s}.csv bare classical sLLG estimates

Default: desk-scale protocol (1 ns + 2 ns, 5 realizations, 8 temperatures).
With --paper-scale: 5 ns + 10 ns per realization and a denser grid; pair it
with --s 1 --realizations 10 for the higher-spin variant of the figure.
Paper-scale runs take many core-hours; use --workers.

Examples:
  python3 scripts/run_antiferro_dimer.py --out-dir out/
  python3 scripts/run_antiferro_dimer.py --s 1 --realizations 10 --paper-scale --workers 8 --out-dir out/
"""

import argparse
import sys

import numpy as np

from pisd import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--s", type=float, default=0.5, help="spin quantum number (default 0.5)")
    ap.add_argument("--realizations", type=int, default=5)
    ap.add_argument("--paper-scale", action="store_true",
                    help="full 5 ns + 10 ns protocol with a dense temperature grid")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default=".")
    args = ap.parse_args()

    n_temps = 16 if args.paper_scale else 8
    temps = np.geomspace(0.5, 10.0, n_temps)
    temp_arg = ",".join(f"{t:.6g}" for t in temps)
    tag = f"{args.s:g}".replace(".", "p")
    common = ["--s", str(args.s), "--J-over-gmuBBz", "-2", "--Bz", "1",
              "--seed", str(args.seed)]
    sweep_common = [*common, "--alpha", "0.5"]

    rc = cli.run(["ed-sweep", *common, "--temps", temp_arg,
                  "--out", f"{args.out_dir}/ed_antiferro_s{tag}.csv"])
    if rc != 0:
        return rc

    for model, out in (("eigen-overlap", f"sweep_antiferro_s{tag}.csv"),
                       ("classical", f"classical_antiferro_s{tag}.csv")):
        argv = ["pisd-sweep", *sweep_common, "--model", model, "--temps", temp_arg,
                "--dt-ns", "7e-7", "--realizations", str(args.realizations),
                "--workers", str(args.workers),
                "--out", f"{args.out_dir}/{out}"]
        if args.paper_scale:
            argv.append("--paper-scale")
        rc = cli.run(argv)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
