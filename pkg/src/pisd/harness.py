"""Experiment orchestration: temperature sweeps, averaging, oracles, CSV I/O.

Sweep protocol: per temperature, N_s independent sLLG trajectories start from
uniformly random orientations, equilibrate for t_equil, then sample n_z every
sample_stride steps for t_average.  The reported expectation value is
C <n_z> with C = hbar*s for classical runs and C = hbar*(s+1) for all
quantum-corrected models; the statistical error is the between-realization
standard error.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .constants import SpinSystemSpec
from .effective import EffectiveFieldModel, make_model
from .quantum import (
    EigenSystem,
    build_two_spin_hamiltonian,
    eigendecompose,
    thermal_expectation_sz,
)
from .sllg import NoiseSettings

SWEEP_HEADER = "temperature_K,sz_over_hbar,std_error,model,order,n_samples,seed"
ED_HEADER = "temperature_K,sz_over_hbar_exact"
DIAG_HEADER = "temperature_K,criterion,mode"

DESK_DT = 5e-15  # 5e-6 ns, the ferromagnetic-figure timestep
DESK_DT_AF = 7e-16  # 7e-7 ns, the antiferromagnetic-figure timestep
DESK_T_EQUIL = 1e-9
DESK_T_AVERAGE = 2e-9
PAPER_T_EQUIL = 5e-9
PAPER_T_AVERAGE = 10e-9


@dataclass(frozen=True)
class SweepConfig:
    spec: SpinSystemSpec
    model: str
    temperatures: tuple[float, ...]
    order: int = 0
    dt: float = DESK_DT
    t_equil: float = DESK_T_EQUIL
    t_average: float = DESK_T_AVERAGE
    n_realizations: int = 5
    sample_stride: int = 100
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.t_equil <= 0 or self.t_average <= 0:
            raise ValueError("t_equil and t_average must be positive")
        if any(t <= 0 for t in self.temperatures):
            raise ValueError("temperatures must be positive")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    T: float
    sz_over_hbar: float
    std_error: float  # units of hbar
    n_samples: int
    model: str
    order: int
    seed: int
    wall_time: float
    failed: bool = False
    reason: str = ""


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def row(self, T: float) -> SweepRow:
        for r in self.rows:
            if math.isclose(r.T, T):
                return r
        raise KeyError(f"no row at T={T}")


def thermal_average(
    trajectories: list[np.ndarray], spec: SpinSystemSpec, quantum: bool
) -> tuple[float, float]:
    """(<S_z>, std_error) in J s from per-realization n_z sample arrays.

    C = hbar*s for classical trajectories, hbar*(s+1) for quantum-corrected
    ones; the error is the standard error of the per-realization means.
    """
    if not trajectories or any(len(t) == 0 for t in trajectories):
        raise ValueError("thermal_average requires non-empty sample arrays")
    c_factor = spec.constants.hbar * (spec.s + 1.0 if quantum else spec.s)
    means = np.array([float(np.mean(t)) for t in trajectories])
    estimate = c_factor * float(means.mean())
    if len(means) > 1:
        err = c_factor * float(means.std(ddof=1)) / math.sqrt(len(means))
    else:
        err = 0.0
    return estimate, err


def _run_realization_task(
    spec: SpinSystemSpec,
    variant: str,
    order: int,
    T: float,
    dt: float,
    t_equil: float,
    t_average: float,
    sample_stride: int,
    seed: int,
    realization: int,
) -> tuple[float, int, bool]:
    """One trajectory; returns (mean n_z, n_samples, failed)."""
    model = make_model(variant, spec, T=T, order=order)
    noise = NoiseSettings(
        alpha=spec.alpha,
        T=T,
        mu_s=spec.mu_s,
        gamma=spec.constants.gamma,
        seed=seed,
        realization_index=realization,
    )
    gen = noise.generator()
    sigma = noise.sigma(dt)
    args = model.kernel_args()
    dummy = np.empty((1, 2, 3))

    # Uniform random initial orientations, redrawn until the effective
    # energy is defined there (quantum series variants can be outside their
    # domain at low temperature; the dynamics is confined to the domain).
    n = None
    for _ in range(256):
        cand = gen.standard_normal((2, 3))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        cand = np.ascontiguousarray(cand)
        if variant == "classical" or not math.isnan(
            kernels.heff_k(*args, cand[0], cand[1])
        ):
            n = cand
            break
    if n is None:
        return math.nan, 0, True

    n_equil = int(round(t_equil / dt))
    n_avg = int(round(t_average / dt))
    chunk = 65536
    # Equilibration: no sampling.
    done = 0
    while done < n_equil:
        todo = min(chunk, n_equil - done)
        eta = gen.standard_normal((todo, 2, 3)) * sigma
        _, _, status, _ = kernels.run_chunk_k(
            *args, n, dt, noise.gamma, noise.alpha, eta, 0, done, dummy, 0, kernels.FD_STEP
        )
        if status != 0:
            return math.nan, 0, True
        done += todo
    # Averaging: accumulate n_z every sample_stride steps.
    nz_sum = 0.0
    n_samples = 0
    done = 0
    while done < n_avg:
        todo = min(chunk, n_avg - done)
        eta = gen.standard_normal((todo, 2, 3)) * sigma
        s_acc, s_cnt, status, _ = kernels.run_chunk_k(
            *args, n, dt, noise.gamma, noise.alpha, eta,
            sample_stride, done, dummy, 0, kernels.FD_STEP,
        )
        if status != 0:
            return math.nan, 0, True
        nz_sum += s_acc
        n_samples += s_cnt
        done += todo
    if n_samples == 0:
        return math.nan, 0, True
    return nz_sum / n_samples, n_samples, False


def run_temperature_sweep(cfg: SweepConfig) -> SweepResult:
    """Full sweep; deterministic given cfg.seed.  Failed temperatures are
    reported in their row rather than aborting the sweep."""
    quantum = cfg.model != "classical"
    tasks = [
        (ti, ri)
        for ti in range(len(cfg.temperatures))
        for ri in range(cfg.n_realizations)
    ]

    def task_args(ti: int, ri: int):
        return (
            cfg.spec, cfg.model, cfg.order, cfg.temperatures[ti],
            cfg.dt, cfg.t_equil, cfg.t_average, cfg.sample_stride, cfg.seed, ri,
        )

    results: dict[tuple[int, int], tuple[float, int, bool]] = {}
    t0_all = time.monotonic()
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {key: pool.submit(_run_realization_task, *task_args(*key)) for key in tasks}
            for key, fut in futures.items():
                results[key] = fut.result()
    else:
        for key in tasks:
            results[key] = _run_realization_task(*task_args(*key))

    wall = time.monotonic() - t0_all
    rows = []
    for ti, T in enumerate(cfg.temperatures):
        per_real = [results[(ti, ri)] for ri in range(cfg.n_realizations)]
        failed = any(r[2] for r in per_real)
        if failed:
            rows.append(
                SweepRow(
                    T=T, sz_over_hbar=math.nan, std_error=math.nan, n_samples=0,
                    model=cfg.model, order=cfg.order, seed=cfg.seed,
                    wall_time=wall, failed=True,
                    reason="effective-field series lost positivity "
                           "(low-temperature truncation regime)",
                )
            )
            continue
        samples = [np.array([r[0]]) for r in per_real]
        est, err = thermal_average(samples, cfg.spec, quantum=quantum)
        hbar = cfg.spec.constants.hbar
        rows.append(
            SweepRow(
                T=T,
                sz_over_hbar=est / hbar,
                std_error=err / hbar,
                n_samples=sum(r[1] for r in per_real),
                model=cfg.model,
                order=cfg.order,
                seed=cfg.seed,
                wall_time=wall / len(cfg.temperatures),
            )
        )
    return SweepResult(rows=tuple(rows))


def run_ed_sweep(spec: SpinSystemSpec, temperatures) -> list[float]:
    """Exact-diagonalisation <S_z>/hbar at each temperature."""
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    hbar = spec.constants.hbar
    return [thermal_expectation_sz(eig, T, spec) / hbar for T in temperatures]


def classical_reference_quadrature(
    spec: SpinSystemSpec, T: float, rtol: float = 1e-8
) -> float:
    """<n_z> of the classical two-spin Boltzmann distribution by quadrature.

    Product Gauss-Legendre nodes in (cos t1, cos t2) and a periodic trapezoid
    rule in the relative azimuth; the grid is refined until the value is
    converged to rtol."""
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    b_norm = float(np.linalg.norm(spec.B_vec))
    if b_norm == 0.0:
        return 0.0  # odd integrand by inversion symmetry
    cos_proj = spec.B[2] / b_norm  # rotate so the field is the polar axis
    beta = spec.beta(T)
    ex = spec.J * spec.s ** 2
    zee = spec.constants.g_mu_B * spec.s * b_norm

    prev = None
    for m in (16, 32, 64, 128, 256, 512):
        x, w = np.polynomial.legendre.leggauss(m)
        dphi = 2.0 * np.pi / m
        phi = np.arange(m) * dphi
        c1 = x[:, None, None]
        c2 = x[None, :, None]
        s1 = np.sqrt(1.0 - c1 ** 2)
        s2 = np.sqrt(1.0 - c2 ** 2)
        dot = c1 * c2 + s1 * s2 * np.cos(phi[None, None, :])
        energy = -beta * (-ex * dot - zee * (c1 + c2))
        energy -= energy.max()
        boltz = np.exp(energy)
        weight = w[:, None, None] * w[None, :, None]
        z = float((boltz * weight).sum())
        num = float((boltz * weight * 0.5 * (c1 + c2)).sum())
        val = cos_proj * num / z
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-30):
            return val
        prev = val
    raise RuntimeError("classical quadrature did not converge to the requested tolerance")


def convergence_diagnostic(spec: SpinSystemSpec, T: float, mode: str) -> float:
    """Appendix-style convergence criteria, compared against 1.

    'supremum': beta * lambda_max of the quantum Hamiltonian.
    'difference': magnitude of the second-order term of the expansion around
    the classical limit, (beta * (lambda_max - max H_cl))^2 / 2, with the
    classical maximum taken over a 64x64 orientation grid per sphere.
    """
    if mode not in ("supremum", "difference"):
        raise ValueError(f"unknown diagnostic mode {mode!r}")
    beta = spec.beta(T)
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    lam_max = float(eig.eigenvalues.max())
    if mode == "supremum":
        return beta * lam_max
    hcl_max = _classical_grid_max(spec, 64)
    return 0.5 * (beta * (lam_max - hcl_max)) ** 2


def _classical_grid_max(spec: SpinSystemSpec, m: int) -> float:
    ct = np.linspace(-1.0, 1.0, m)
    phi = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    st = np.sqrt(np.clip(1.0 - ct ** 2, 0.0, None))
    # All orientations per sphere over the (cos theta, phi) grid.
    nx = (st[:, None] * np.cos(phi)[None, :]).ravel()
    ny = (st[:, None] * np.sin(phi)[None, :]).ravel()
    nz = np.repeat(ct, m)
    n = np.stack([nx, ny, nz], axis=1)
    dots = n @ n.T
    zee = n @ spec.B_vec
    energy = -spec.J * spec.s ** 2 * dots - spec.constants.g_mu_B * spec.s * (
        zee[:, None] + zee[None, :]
    )
    return float(energy.max())


def diagnostic_crossing(
    spec: SpinSystemSpec, mode: str, t_low: float = 0.01, t_high: float = 1e5
) -> float:
    """Temperature where the criterion crosses 1 (criteria scale as 1/T^k)."""
    if mode not in ("supremum", "difference"):
        raise ValueError(f"unknown diagnostic mode {mode!r}")
    # The spectrum and the classical grid maximum are temperature-independent;
    # hoist them out of the bisection loop.
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    lam_max = float(eig.eigenvalues.max())
    if mode == "supremum":
        crit_at = lambda T: spec.beta(T) * lam_max
    else:
        gap = lam_max - _classical_grid_max(spec, 64)
        crit_at = lambda T: 0.5 * (spec.beta(T) * gap) ** 2
    c_high = crit_at(t_high)
    if c_high >= 1.0:
        return math.inf
    if crit_at(t_low) <= 1.0:
        return 0.0
    lo, hi = t_low, t_high
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if crit_at(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


# -- CSV persistence -------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_sweep_csv(path: str, result: SweepResult) -> None:
    with open(path, "w") as f:
        f.write(SWEEP_HEADER + "\n")
        for r in result.rows:
            f.write(
                f"{_fmt(r.T)},{_fmt(r.sz_over_hbar)},{_fmt(r.std_error)},"
                f"{r.model},{r.order},{r.n_samples},{r.seed}\n"
            )


def write_ed_csv(path: str, temperatures, values_over_hbar) -> None:
    with open(path, "w") as f:
        f.write(ED_HEADER + "\n")
        for T, v in zip(temperatures, values_over_hbar):
            f.write(f"{_fmt(T)},{_fmt(v)}\n")


def write_diag_csv(path: str, rows: list[tuple[float, float, str]]) -> None:
    with open(path, "w") as f:
        f.write(DIAG_HEADER + "\n")
        for T, crit, mode in rows:
            f.write(f"{_fmt(T)},{_fmt(crit)},{mode}\n")


def write_eigensystem_csv(path: str, eig: EigenSystem) -> None:
    """index,eigenvalue_J plus a sidecar file with one eigenvector per column."""
    with open(path, "w") as f:
        f.write("index,eigenvalue_J\n")
        for i, lam in enumerate(eig.eigenvalues):
            f.write(f"{i},{_fmt(lam)}\n")
    root, ext = os.path.splitext(path)
    sidecar = f"{root}_vectors{ext or '.csv'}"
    dim = eig.eigenvectors.shape[0]
    with open(sidecar, "w") as f:
        f.write(",".join(f"state_{k}" for k in range(dim)) + "\n")
        vecs = eig.eigenvectors
        real = np.abs(vecs.imag).max() < 1e-12 if np.iscomplexobj(vecs) else True
        for i in range(dim):
            if real:
                f.write(",".join(_fmt(float(vecs[i, k].real)) for k in range(dim)) + "\n")
            else:
                f.write(",".join(str(complex(vecs[i, k])) for k in range(dim)) + "\n")
