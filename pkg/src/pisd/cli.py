"""Command-line entry point.

Subcommands:
  ed-sweep    exact-diagonalisation reference curve -> CSV
  pisd-sweep  stochastic effective-field sweep -> CSV
  diagnose    convergence criteria over a temperature range -> CSV
  validate    quick oracle-equivalence checks

Values may also come from a flat key=value config file (--config); explicit
command-line flags override file values.  Keys carry their units (Bz_T,
dt_ns, ...).  The default seed comes from the PISD_SEED environment
variable when --seed is not given.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__, harness
from .constants import SpinSystemSpec
from .coherent import ANALYTIC_KINDS, CoherentConfiguration, analytic_moment, brute_moment, bloch_to_stereo
from .effective import make_model
from .quantum import (
    build_two_spin_hamiltonian,
    closed_form_sz_half,
    eigendecompose,
    thermal_expectation_sz,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG)


# config-file key -> argparse dest (units are part of the key name)
CONFIG_KEYS = {
    "s": "s",
    "J_over_gmuBBz": "j_over",
    "Bz_T": "bz",
    "alpha": "alpha",
    "model": "model",
    "order": "order",
    "Tmin_K": "tmin",
    "Tmax_K": "tmax",
    "points": "points",
    "temps_K": "temps",
    "dt_ns": "dt_ns",
    "t_equil_ns": "t_equil_ns",
    "t_average_ns": "t_average_ns",
    "realizations": "realizations",
    "stride": "stride",
    "seed": "seed",
    "workers": "workers",
    "out": "out",
}

_FLOAT_KEYS = {"s", "j_over", "bz", "alpha", "tmin", "tmax", "dt_ns", "t_equil_ns", "t_average_ns"}
_INT_KEYS = {"order", "points", "realizations", "stride", "seed", "workers"}


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
                key, val = (part.strip() for part in line.split("=", 1))
                if key not in CONFIG_KEYS:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                dest = CONFIG_KEYS[key]
                if dest in _FLOAT_KEYS:
                    values[dest] = float(val)
                elif dest in _INT_KEYS:
                    values[dest] = int(val)
                else:
                    values[dest] = val
    except OSError as exc:
        raise ValueError(f"cannot read config file: {exc}") from exc
    return values


def _add_common(p: _Parser, sweep: bool):
    p.add_argument("--config", help="flat key=value config file; flags override")
    p.add_argument("--s", type=float, default=None, help="spin quantum number")
    p.add_argument("--J-over-gmuBBz", dest="j_over", type=float, default=None,
                   help="exchange in units of g*mu_B*Bz")
    p.add_argument("--Bz", dest="bz", type=float, default=None, help="field along z (T)")
    p.add_argument("--Tmin", dest="tmin", type=float, default=None)
    p.add_argument("--Tmax", dest="tmax", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--out", default=None, help="output CSV path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--temps", default=None, help="comma-separated temperatures (K)")
    if sweep:
        p.add_argument("--alpha", type=float, default=None, help="Gilbert damping")
        p.add_argument("--dt-ns", dest="dt_ns", type=float, default=None)
        p.add_argument("--t-equil-ns", dest="t_equil_ns", type=float, default=None)
        p.add_argument("--t-average-ns", dest="t_average_ns", type=float, default=None)
        p.add_argument("--realizations", type=int, default=None)
        p.add_argument("--stride", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--paper-scale", action="store_true",
                       help="use the 5 ns equilibration + 10 ns averaging protocol")


def _resolve(args, defaults: dict) -> dict:
    cfg = dict(defaults)
    if getattr(args, "config", None):
        cfg.update(_read_config_file(args.config))
    for dest in set(CONFIG_KEYS.values()):
        val = getattr(args, dest, None)
        if val is not None:
            cfg[dest] = val
    if cfg.get("seed") is None:
        cfg["seed"] = int(os.environ.get("PISD_SEED", "0"))
    return cfg


def _spec_from(cfg: dict) -> SpinSystemSpec:
    const_gmub = SpinSystemSpec(s=0.5, J=0.0, B=(0, 0, 0)).constants.g_mu_B
    bz = cfg["bz"]
    return SpinSystemSpec(
        s=cfg["s"],
        J=cfg["j_over"] * const_gmub * bz,
        B=(0.0, 0.0, bz),
        alpha=cfg.get("alpha", 0.5),
    )


def _temperatures(cfg: dict) -> list[float]:
    if cfg.get("temps"):
        return [float(t) for t in str(cfg["temps"]).split(",")]
    return list(np.linspace(cfg["tmin"], cfg["tmax"], cfg["points"]))


def _write_manifest(out_path: str, cfg: dict, outputs: list[str], t_start: float) -> None:
    manifest = {
        "tool": "pisd",
        "version": __version__,
        "config": {k: cfg.get(v) for k, v in CONFIG_KEYS.items() if cfg.get(v) is not None},
        "seed": cfg.get("seed"),
        "started": datetime.datetime.fromtimestamp(t_start, datetime.timezone.utc).isoformat(),
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    path = out_path + ".manifest.json"
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)) or ".")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_ed_sweep(args) -> int:
    t0 = time.time()
    cfg = _resolve(args, {"tmin": 0.1, "tmax": 10.0, "points": 50, "out": "ed.csv"})
    try:
        spec = _spec_from(cfg)
        temps = _temperatures(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    values = harness.run_ed_sweep(spec, temps)
    harness.write_ed_csv(cfg["out"], temps, values)
    _write_manifest(cfg["out"], cfg, [cfg["out"]], t0)
    print(f"wrote {cfg['out']} ({len(temps)} temperatures)")
    return EXIT_OK


def _cmd_pisd_sweep(args) -> int:
    t0 = time.time()
    defaults = {
        "model": "eigen-overlap", "order": 3, "alpha": 0.5,
        "dt_ns": 5e-6, "t_equil_ns": 1.0, "t_average_ns": 2.0,
        "realizations": 5, "stride": 100, "workers": 1, "out": "sweep.csv",
    }
    cfg = _resolve(args, defaults)
    if getattr(args, "paper_scale", False):
        cfg["t_equil_ns"] = 5.0
        cfg["t_average_ns"] = 10.0
    try:
        spec = _spec_from(cfg)
        temps = _temperatures(cfg)
        sweep_cfg = harness.SweepConfig(
            spec=spec,
            model=cfg["model"],
            order=cfg["order"],
            temperatures=tuple(temps),
            dt=cfg["dt_ns"] * 1e-9,
            t_equil=cfg["t_equil_ns"] * 1e-9,
            t_average=cfg["t_average_ns"] * 1e-9,
            n_realizations=cfg["realizations"],
            sample_stride=cfg["stride"],
            seed=cfg["seed"],
            workers=cfg["workers"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = harness.run_temperature_sweep(sweep_cfg)
    harness.write_sweep_csv(cfg["out"], result)
    _write_manifest(cfg["out"], cfg, [cfg["out"]], t0)
    n_failed = sum(r.failed for r in result.rows)
    for r in result.rows:
        if r.failed:
            print(f"T={r.T} K failed: {r.reason}", file=sys.stderr)
    print(f"wrote {cfg['out']} ({len(result.rows)} rows, {n_failed} failed)")
    return EXIT_NUMERIC if n_failed == len(result.rows) else EXIT_OK


def _cmd_diagnose(args) -> int:
    t0 = time.time()
    cfg = _resolve(args, {"tmin": 0.1, "tmax": 100.0, "points": 200, "out": "diagnostics.csv"})
    try:
        spec = _spec_from(cfg)
        temps = _temperatures(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = []
    for mode in ("supremum", "difference"):
        for T in temps:
            rows.append((T, harness.convergence_diagnostic(spec, T, mode), mode))
    harness.write_diag_csv(cfg["out"], rows)
    _write_manifest(cfg["out"], cfg, [cfg["out"]], t0)
    for mode in ("supremum", "difference"):
        crossing = harness.diagnostic_crossing(spec, mode)
        print(f"{mode} criterion crosses 1 at T = {crossing:.4g} K "
              f"(convergent well above this temperature)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _resolve(args, {})
    rng = np.random.default_rng(cfg["seed"] or 12345)
    failures = 0

    def check(name: str, ok: bool):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    # ED vs closed form, s=1/2.
    spec = _spec_from({"s": 0.5, "j_over": 1.0, "bz": 1.0})
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    worst = 0.0
    for T in np.geomspace(0.1, 10.0, 20):
        a = thermal_expectation_sz(eig, T, spec)
        b = closed_form_sz_half(T, spec.J, spec.B[2], spec.constants)
        worst = max(worst, abs(a - b) / abs(b))
    check("exact diagonalisation matches the closed form (s=1/2)", worst < 1e-10)

    # Analytic vs brute-force coherent-state moments.
    worst = 0.0
    for s in (0.5, 1.0, 2.0):
        for _ in range(20):
            n = rng.standard_normal(3)
            n /= np.linalg.norm(n)
            if n[2] < -0.999:
                n[2] = abs(n[2])
            z = bloch_to_stereo(n)
            other = np.array([0.0, 0.0, 1.0])
            config = CoherentConfiguration(n, other)
            for kind in ANALYTIC_KINDS:
                if kind in ("SpN", "SmN"):
                    continue
                from .coherent import KIND_OPERATORS
                a = analytic_moment(kind, s, z)
                b = brute_moment(KIND_OPERATORS[kind], s, config)
                worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-120))
    check("analytic coherent-state moments match brute force", worst < 1e-10)

    # Eigen-overlap effective Hamiltonian vs dense matrix exponential.
    from scipy.linalg import expm
    from .coherent import coherent_state_vector
    worst = 0.0
    for s in (0.5, 1.0):
        spec_s = _spec_from({"s": s, "j_over": 1.0, "bz": 1.0})
        model = make_model("eigen-overlap", spec_s, T=2.0)
        beta = model.beta
        em = expm(-beta * model.hamiltonian.matrix)
        for _ in range(10):
            n = rng.standard_normal((2, 3))
            n /= np.linalg.norm(n, axis=1, keepdims=True)
            config = CoherentConfiguration(n[0], n[1])
            psi = coherent_state_vector(s, config)
            ref = -np.log(np.vdot(psi, em @ psi).real) / beta
            val = model.energy(config)
            worst = max(worst, abs(val - ref) / abs(ref))
    check("eigen-overlap H_eff matches the matrix-exponential oracle", worst < 1e-10)

    print("validate:", "OK" if failures == 0 else f"{failures} failure(s)")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def build_parser() -> _Parser:
    parser = _Parser(prog="pisd", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"pisd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_ed = sub.add_parser("ed-sweep", help="exact-diagonalisation reference curve")
    _add_common(p_ed, sweep=False)
    p_ed.set_defaults(func=_cmd_ed_sweep)

    p_sw = sub.add_parser("pisd-sweep", help="stochastic effective-field sweep")
    _add_common(p_sw, sweep=True)
    p_sw.add_argument("--model", default=None,
                      choices=["classical", "series-exact", "series-high-t",
                               "difference", "eigen-overlap"])
    p_sw.add_argument("--order", type=int, default=None)
    p_sw.set_defaults(func=_cmd_pisd_sweep)

    p_di = sub.add_parser("diagnose", help="convergence criteria")
    _add_common(p_di, sweep=False)
    p_di.set_defaults(func=_cmd_diagnose)

    p_va = sub.add_parser("validate", help="oracle-equivalence checks")
    p_va.add_argument("--config", help="flat key=value config file")
    p_va.add_argument("--seed", type=int, default=None)
    p_va.set_defaults(func=_cmd_validate)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
