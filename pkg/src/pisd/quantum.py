"""General-spin operators, the two-spin Hamiltonian and its exact thermal averages.

Basis convention: single-site states are indexed by p = s - m, p = 0..2s,
and the two-site product basis |p1, p2> is row-major in (p1, p2).
Spin matrices carry units of hbar, the Hamiltonian units of Joules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import PhysicalConstants, SpinSystemSpec, is_half_integer_spin

_CONST = PhysicalConstants()


@dataclass(frozen=True)
class SpinMatrices:
    s: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


@dataclass(frozen=True)
class TwoSpinHamiltonian:
    spec: SpinSystemSpec
    matrix: np.ndarray  # (dim, dim) complex Hermitian, Joules


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray  # ascending, Joules
    eigenvectors: np.ndarray  # orthonormal columns, product basis


def build_spin_matrices(s: float, hbar: float = _CONST.hbar) -> SpinMatrices:
    """Dense spin operators for quantum number s via the ladder construction.

    S-|p> = hbar sqrt((2s-p)(p+1)) |p+1>,  S+|p> = hbar sqrt(p(2s-p+1)) |p-1>,
    Sz|p> = hbar (s-p) |p>, with Sx = (S+ + S-)/2 and Sy = (S+ - S-)/(2i).
    """
    if not is_half_integer_spin(s):
        raise ValueError(f"s must be a positive half-integer, got {s}")
    dim = int(round(2 * s)) + 1
    two_s = dim - 1
    sp = np.zeros((dim, dim), dtype=complex)
    sm = np.zeros((dim, dim), dtype=complex)
    for p in range(dim - 1):
        # S- maps p -> p+1, S+ maps p+1 -> p; both share the same element.
        elem = hbar * math.sqrt((two_s - p) * (p + 1))
        sm[p + 1, p] = elem
        sp[p, p + 1] = elem
    sz = hbar * np.diag([s - p for p in range(dim)]).astype(complex)
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    return SpinMatrices(s=s, sx=sx, sy=sy, sz=sz)


def ladder_matrices(s: float, hbar: float = _CONST.hbar) -> tuple[np.ndarray, np.ndarray]:
    """(S+, S-) for quantum number s, same convention as build_spin_matrices."""
    mats = build_spin_matrices(s, hbar)
    return mats.sx + 1j * mats.sy, mats.sx - 1j * mats.sy


def build_two_spin_hamiltonian(spec: SpinSystemSpec) -> TwoSpinHamiltonian:
    """H = -(J/hbar^2) S1.S2 - (g mu_B/hbar) B.(S1 + S2) in the product basis."""
    c = spec.constants
    mats = build_spin_matrices(spec.s, c.hbar)
    dim_site = spec.dim_site
    eye = np.eye(dim_site)
    h = np.zeros((dim_site ** 2, dim_site ** 2), dtype=complex)
    for op in (mats.sx, mats.sy, mats.sz):
        h -= (spec.J / c.hbar ** 2) * np.kron(op, op)
    b_dot_s = spec.B[0] * mats.sx + spec.B[1] * mats.sy + spec.B[2] * mats.sz
    zeeman = np.kron(b_dot_s, eye) + np.kron(eye, b_dot_s)
    h -= (c.g_mu_B / c.hbar) * zeeman
    return TwoSpinHamiltonian(spec=spec, matrix=h)


def eigendecompose(ham: TwoSpinHamiltonian | np.ndarray) -> EigenSystem:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    h = ham.matrix if isinstance(ham, TwoSpinHamiltonian) else np.asarray(ham)
    scale = np.abs(h).max()
    asym = np.abs(h - h.conj().T).max()
    if scale > 0 and asym > 1e-10 * scale:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    evals, evecs = np.linalg.eigh(h)
    return EigenSystem(eigenvalues=evals, eigenvectors=evecs)


def sz_total_matrix(spec: SpinSystemSpec) -> np.ndarray:
    """(Sz x 1 + 1 x Sz) in the product basis, units of hbar (J s)."""
    mats = build_spin_matrices(spec.s, spec.constants.hbar)
    eye = np.eye(spec.dim_site)
    return np.kron(mats.sz, eye) + np.kron(eye, mats.sz)


def thermal_expectation_sz(eig: EigenSystem, T: float, spec: SpinSystemSpec) -> float:
    """<Sz> = (1/2) Tr[(Sz1+Sz2) exp(-beta H)] / Tr[exp(-beta H)], in J s.

    Boltzmann weights use the min-eigenvalue shift so low temperatures
    cannot overflow.
    """
    beta = spec.beta(T)
    lam = eig.eigenvalues
    v = eig.eigenvectors
    sz_tot = sz_total_matrix(spec)
    # Diagonal matrix elements <v_k| Sz1+Sz2 |v_k>.
    m = np.einsum("ik,ij,jk->k", v.conj(), sz_tot, v).real
    w = np.exp(-beta * (lam - lam.min()))
    return 0.5 * float(np.dot(w, m) / w.sum())


def closed_form_sz_half(
    T: float, J: float, B_z: float, constants: PhysicalConstants = _CONST
) -> float:
    """Closed form for <Sz> of two s=1/2 spins with B along z, in J s.

    (hbar/2) (e^x - e^-x) / (e^{-beta J} + 1 + e^-x + e^x), x = beta g mu_B B_z.
    """
    if T <= 0:
        raise ValueError(f"temperature must be positive, got {T}")
    beta = 1.0 / (constants.k_B * T)
    x = beta * constants.g_mu_B * B_z
    # Shift all exponents by the largest one so low T cannot overflow.
    shift = max(-beta * J, 0.0, -x, x)
    num = math.exp(x - shift) - math.exp(-x - shift)
    den = (
        math.exp(-beta * J - shift)
        + math.exp(-shift)
        + math.exp(-x - shift)
        + math.exp(x - shift)
    )
    return 0.5 * constants.hbar * num / den


def _fact(x: float) -> int:
    n = round(x)
    if abs(x - n) > 1e-9 or n < 0:
        raise ValueError(f"expected a non-negative integer, got {x}")
    return math.factorial(n)


def clebsch_gordan(j1: float, m1: float, j2: float, m2: float, S: float, M: float) -> float:
    """<j1 m1; j2 m2 | S M> in the Condon-Shortley convention.

    Exact rational arithmetic under the square root; returns a float.
    """
    for j, m in ((j1, m1), (j2, m2), (S, M)):
        if abs(m) > j + 1e-9:
            raise ValueError(f"|m|={m} exceeds j={j}")
        if abs((j - m) - round(j - m)) > 1e-9:
            raise ValueError(f"j={j}, m={m} do not differ by an integer")
    if S > j1 + j2 + 1e-9 or S < abs(j1 - j2) - 1e-9:
        raise ValueError(f"S={S} violates the triangle rule for j1={j1}, j2={j2}")
    if abs(M - (m1 + m2)) > 1e-9:
        return 0.0

    pref = Fraction(
        (2 * round(2 * S) + 2)
        * _fact(j1 + j2 - S) * _fact(j1 - j2 + S) * _fact(-j1 + j2 + S)
        * _fact(S + M) * _fact(S - M)
        * _fact(j1 - m1) * _fact(j1 + m1) * _fact(j2 - m2) * _fact(j2 + m2),
        2 * _fact(j1 + j2 + S + 1),
    )
    total = Fraction(0)
    k_min = max(0, round(j2 - m1 - S), round(j1 + m2 - S))
    k_max = min(round(j1 + j2 - S), round(j1 - m1), round(j2 + m2))
    for k in range(k_min, k_max + 1):
        term = Fraction(
            (-1) ** k,
            _fact(k) * _fact(j1 + j2 - S - k) * _fact(j1 - m1 - k)
            * _fact(j2 + m2 - k) * _fact(S - j2 + m1 + k) * _fact(S - j1 - m2 + k),
        )
        total += term
    return math.sqrt(float(pref)) * float(total)
