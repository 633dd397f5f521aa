"""Effective Hamiltonians for the two-spin system and their per-site fields.

Variants:
  classical      -J s^2 n1.n2 - g mu_B s B.(n1+n2)
  series-exact   -(1/beta) ln(1 + F[beta, N]) with F the truncated
                 exponential series of <z|H^k|z> moments
  series-high-t  -(1/beta) of the order-N Taylor expansion of ln(1+F)
  difference     classical + log of the truncated series of
                 <z|(H - H_cl)^k|z> moments
  eigen-overlap  -(1/beta) ln sum_k e^{-beta lam_k} |<v_k|z>|^2 (exact;
                 requires the field along the quantisation axis z)

The series moments here are computed by repeated dense application of H to
the coherent-state vector; the numba kernels evaluate the same quantities
through the eigenbasis and are cross-checked against this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .coherent import CoherentConfiguration, coherent_state_vector, site_amplitudes
from .constants import SpinSystemSpec
from .quantum import EigenSystem, TwoSpinHamiltonian, build_two_spin_hamiltonian, eigendecompose

VARIANTS = ("classical", "series-exact", "series-high-t", "difference", "eigen-overlap")

_VARIANT_CODES = {
    "classical": kernels.CLASSICAL,
    "series-exact": kernels.SERIES_EXACT,
    "series-high-t": kernels.SERIES_HIGH_T,
    "difference": kernels.DIFFERENCE,
    "eigen-overlap": kernels.EIGEN_OVERLAP,
}

SERIES_VARIANTS = ("series-exact", "series-high-t", "difference")


class SeriesDomainError(ArithmeticError):
    """The truncated exponential series lost positivity; raise the order N
    or the temperature (the expected low-temperature failure mode)."""


def classical_energy(spec: SpinSystemSpec, config: CoherentConfiguration) -> float:
    """-J s^2 (n1.n2) - g mu_B s B.(n1 + n2), in Joules."""
    n1, n2 = config.n1, config.n2
    zeeman = float(np.dot(spec.B_vec, n1 + n2))
    return -spec.J * spec.s ** 2 * float(np.dot(n1, n2)) - spec.constants.g_mu_B * spec.s * zeeman


@dataclass(frozen=True)
class FieldSample:
    b1: np.ndarray  # Tesla
    b2: np.ndarray  # Tesla
    energy: float  # Joules


@dataclass
class EffectiveFieldModel:
    """One effective-Hamiltonian variant bound to a system and a temperature.

    Immutable after construction; evaluation methods are pure functions of
    the configuration.  Build instances through `make_model`.
    """

    variant: str
    spec: SpinSystemSpec
    T: float
    order: int = 0
    hamiltonian: TwoSpinHamiltonian | None = None
    eig: EigenSystem | None = None
    _kernel_args: tuple = field(default=None, repr=False)

    @property
    def beta(self) -> float:
        return self.spec.beta(self.T)

    # -- reference (dense) evaluation ------------------------------------

    def series_F(self, config: CoherentConfiguration) -> float:
        """F[beta, N] = sum_{k=1..N} (-beta)^k / k! <z|H^k|z>."""
        if self.variant not in ("series-exact", "series-high-t"):
            raise ValueError(f"series_F is undefined for variant {self.variant!r}")
        return self._series_sum(config, shift=0.0) - 1.0

    def _series_sum(self, config: CoherentConfiguration, shift: float) -> float:
        """1 + sum_{k=1..N} (-beta)^k/k! <z|(H - shift)^k|z> by dense application."""
        if self.order < 1:
            raise ValueError(f"series order must be >= 1, got {self.order}")
        # Apply the dimensionless beta*(H - shift) so high orders cannot
        # overflow in beta^k while <H^k> underflows in Joules^k.
        beta = self.beta
        hb = beta * self.hamiltonian.matrix
        shift_b = beta * shift
        psi = coherent_state_vector(self.spec.s, config)
        vec = psi.copy()
        total = 1.0
        coef = 1.0
        for k in range(1, self.order + 1):
            vec = hb @ vec - shift_b * vec
            coef *= -1.0 / k
            total += coef * float(np.vdot(psi, vec).real)
        return total

    def energy(self, config: CoherentConfiguration) -> float:
        """Effective Hamiltonian value in Joules."""
        beta = self.beta if self.variant != "classical" else None
        if self.variant == "classical":
            return classical_energy(self.spec, config)
        if self.variant == "series-exact":
            one_plus_f = self._series_sum(config, shift=0.0)
            if one_plus_f <= 0.0:
                raise SeriesDomainError(
                    f"1 + F = {one_plus_f:.3e} <= 0 at T={self.T} K, order N={self.order}"
                )
            return -math.log(one_plus_f) / beta
        if self.variant == "series-high-t":
            f = self._series_sum(config, shift=0.0) - 1.0
            acc = 0.0
            for k in range(1, self.order + 1):
                acc += (-1.0) ** (k + 1) / k * f ** k
            return -acc / beta
        if self.variant == "difference":
            hcl = classical_energy(self.spec, config)
            series = self._series_sum(config, shift=hcl)
            if series <= 0.0:
                raise SeriesDomainError(
                    f"difference series = {series:.3e} <= 0 at T={self.T} K, "
                    f"order N={self.order}"
                )
            return hcl - math.log(series) / beta
        # eigen-overlap, log-sum-exp stabilised by the eigenvalue shift
        lam = self.eig.eigenvalues
        psi = coherent_state_vector(self.spec.s, config)
        c = self.eig.eigenvectors.conj().T @ psi
        w = np.abs(c) ** 2
        lam_min = lam.min()
        total = float(np.dot(np.exp(-beta * (lam - lam_min)), w))
        if total <= 0.0:
            raise SeriesDomainError(f"vanishing overlap weight at T={self.T} K")
        return lam_min - math.log(total) / beta

    def effective_field(self, config: CoherentConfiguration) -> FieldSample:
        """B_eff per site: -(1/mu_s) grad_n H_eff, in Tesla.

        The classical variant is analytic; quantum variants use 4th-order
        central finite differences with step h = 1e-6 on the ambient
        coordinates, each evaluation point renormalised onto the sphere.

        The difference variant uses the rational form of the gradient,
        grad(hcl) - grad(g)/(beta g) with g the plain truncated series:
        this stays defined wherever g is nonzero, including the low-
        temperature region where g < 0 puts the log-energy itself outside
        its domain.  There the reported energy is hcl - ln|g|/beta.
        """
        spec = self.spec
        mus = spec.mu_s
        if self.variant == "classical":
            b1 = (spec.J * spec.s / spec.constants.g_mu_B) * config.n2 + spec.B_vec
            b2 = (spec.J * spec.s / spec.constants.g_mu_B) * config.n1 + spec.B_vec
            return FieldSample(b1=b1, b2=b2, energy=classical_energy(spec, config))
        h = kernels.FD_STEP
        if self.variant == "difference":
            hcl0 = classical_energy(spec, config)
            g0 = self._series_sum(config, shift=hcl0)
            if g0 == 0.0 or not math.isfinite(g0):
                raise SeriesDomainError(
                    f"difference series = {g0:.3e} at T={self.T} K, order N={self.order}"
                )
            energy = hcl0 - math.log(abs(g0)) / self.beta
            coupling = spec.J * spec.s / spec.constants.g_mu_B
            fields = []
            for base, other, first in ((config.n1, config.n2, True), (config.n2, config.n1, False)):
                grad = np.empty(3)
                for c in range(3):
                    vals = []
                    for off in (-2.0, -1.0, 1.0, 2.0):
                        pt = base.copy()
                        pt[c] += off * h
                        pt /= np.linalg.norm(pt)
                        cfg = (
                            CoherentConfiguration(pt, other)
                            if first
                            else CoherentConfiguration(other, pt)
                        )
                        vals.append(self._series_sum(cfg, shift=classical_energy(spec, cfg)))
                    grad[c] = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
                fields.append(coupling * other + spec.B_vec + grad / (self.beta * g0 * mus))
            return FieldSample(b1=fields[0], b2=fields[1], energy=energy)
        energy = self.energy(config)
        grads = []
        for base, other, first in ((config.n1, config.n2, True), (config.n2, config.n1, False)):
            grad = np.empty(3)
            for c in range(3):
                vals = []
                for off in (-2.0, -1.0, 1.0, 2.0):
                    pt = base.copy()
                    pt[c] += off * h
                    pt /= np.linalg.norm(pt)
                    cfg = (
                        CoherentConfiguration(pt, other)
                        if first
                        else CoherentConfiguration(other, pt)
                    )
                    vals.append(self.energy(cfg))
                grad[c] = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
            grads.append(-grad / mus)
        return FieldSample(b1=grads[0], b2=grads[1], energy=energy)

    # -- kernel plumbing ---------------------------------------------------

    def kernel_args(self) -> tuple:
        """Positional argument pack shared by the numba kernels."""
        return self._kernel_args


def make_model(
    variant: str,
    spec: SpinSystemSpec,
    T: float | None = None,
    order: int = 0,
    eig: EigenSystem | None = None,
) -> EffectiveFieldModel:
    """Construct an EffectiveFieldModel, diagonalising the Hamiltonian once."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if variant in SERIES_VARIANTS and order < 1:
        raise ValueError(f"variant {variant!r} requires order N >= 1, got {order}")
    if variant != "classical":
        if T is None or T <= 0:
            raise ValueError(f"variant {variant!r} requires a positive temperature")
    if variant == "eigen-overlap" and (spec.B[0] != 0.0 or spec.B[1] != 0.0):
        raise ValueError(
            "eigen-overlap requires the field along the quantisation axis z"
        )

    ham = None
    if variant != "classical":
        ham = build_two_spin_hamiltonian(spec)
        if eig is None:
            eig = eigendecompose(ham)

    model = EffectiveFieldModel(
        variant=variant,
        spec=spec,
        T=T if T is not None else math.inf,
        order=order,
        hamiltonian=ham,
        eig=eig,
    )
    model._kernel_args = _build_kernel_args(model)
    return model


def _build_kernel_args(model: EffectiveFieldModel) -> tuple:
    spec = model.spec
    c = spec.constants
    dim_site = spec.dim_site
    two_s = dim_site - 1
    sqb = np.array([math.sqrt(math.comb(two_s, p)) for p in range(dim_site)])
    if model.variant == "classical":
        lam = np.zeros(1)
        vh = np.zeros((1, 1), dtype=complex)
        wser = np.zeros(1)
        boltz = np.zeros(1)
        lam_min = 0.0
        beta = 0.0
    else:
        beta = model.beta
        lam = model.eig.eigenvalues
        vh = np.ascontiguousarray(model.eig.eigenvectors.conj().T)
        lam_min = float(lam.min())
        boltz = np.exp(-beta * (lam - lam_min))
        # Truncated exponential-series weights sum_{k=1..N} (-beta lam_j)^k / k!.
        wser = np.zeros_like(lam)
        if model.variant in ("series-exact", "series-high-t"):
            term = np.ones_like(lam)
            for k in range(1, model.order + 1):
                term = term * (-beta * lam) / k
                wser += term
    return (
        _VARIANT_CODES[model.variant],
        int(model.order),
        float(beta),
        float(spec.s),
        float(spec.J),
        float(spec.B[0]),
        float(spec.B[1]),
        float(spec.B[2]),
        float(c.g_mu_B),
        sqb,
        lam,
        lam_min,
        vh,
        wser,
        boltz,
    )


def kernel_energy(model: EffectiveFieldModel, config: CoherentConfiguration) -> float:
    """Evaluate H_eff through the numba kernel path (NaN on domain loss)."""
    args = model.kernel_args()
    return kernels.heff_k(*args, np.ascontiguousarray(config.n1), np.ascontiguousarray(config.n2))


def kernel_field(model: EffectiveFieldModel, config: CoherentConfiguration) -> FieldSample:
    """Evaluate the effective field through the numba kernel path."""
    args = model.kernel_args()
    b1, b2, e = kernels.effective_field_k(
        *args,
        np.ascontiguousarray(config.n1),
        np.ascontiguousarray(config.n2),
        kernels.FD_STEP,
    )
    return FieldSample(b1=b1, b2=b2, energy=e)
