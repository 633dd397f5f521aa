"""Spin-coherent-state geometry and matrix elements.

Stereographic coordinate z = tan(theta/2) e^{i phi}; all amplitudes are built
in the normalised half-angle form, which is regular on the whole sphere
(including the south pole, where z itself diverges).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants, is_half_integer_spin
from .quantum import build_spin_matrices, ladder_matrices

_CONST = PhysicalConstants()

MAX_SPIN = 5.0
MAX_PRODUCT_LENGTH = 6


class PoleSingularityError(ValueError):
    """Raised when a Bloch vector at (or numerically at) the south pole
    is mapped to the stereographic plane."""


@dataclass
class CoherentConfiguration:
    """Pair of unit Bloch vectors, one per site."""

    n1: np.ndarray
    n2: np.ndarray

    def __post_init__(self):
        self.n1 = np.asarray(self.n1, dtype=float)
        self.n2 = np.asarray(self.n2, dtype=float)
        for n in (self.n1, self.n2):
            if abs(np.dot(n, n) - 1.0) > 1e-12:
                raise ValueError(f"Bloch vector must be unit norm, got |n|^2={np.dot(n, n)}")


def stereo_to_bloch(z: complex) -> np.ndarray:
    """n = ((z+z*)/(1+|z|^2), -i(z-z*)/(1+|z|^2), (1-|z|^2)/(1+|z|^2))."""
    z = complex(z)
    denom = 1.0 + abs(z) ** 2
    return np.array([2.0 * z.real / denom, 2.0 * z.imag / denom, (1.0 - abs(z) ** 2) / denom])


def bloch_to_stereo(n: np.ndarray) -> complex:
    """Inverse stereographic map; undefined at the south pole."""
    n = np.asarray(n, dtype=float)
    if n[2] <= -1.0 + 1e-12:
        raise PoleSingularityError(
            "south pole has no finite stereographic coordinate; "
            "use the half-angle amplitudes instead"
        )
    return complex(n[0], n[1]) / (1.0 + n[2])


def site_amplitudes(s: float, n: np.ndarray, hbar: float = _CONST.hbar) -> np.ndarray:
    """Amplitudes <p|z(n)> over p = 0..2s for a single site.

    amp_p = sqrt(C(2s,p)) cos^{2s-p}(theta/2) sin^p(theta/2) e^{i p phi}.
    """
    if not is_half_integer_spin(s):
        raise ValueError(f"s must be a positive half-integer, got {s}")
    n = np.asarray(n, dtype=float)
    dim = int(round(2 * s)) + 1
    two_s = dim - 1
    nz = min(1.0, max(-1.0, n[2]))
    ct = math.sqrt(0.5 * (1.0 + nz))
    st = math.sqrt(0.5 * (1.0 - nz))
    phi = math.atan2(n[1], n[0])
    eip = complex(math.cos(phi), math.sin(phi))
    amps = np.empty(dim, dtype=complex)
    zp = complex(1.0, 0.0)
    for p in range(dim):
        amps[p] = math.sqrt(math.comb(two_s, p)) * ct ** (two_s - p) * st ** p * zp
        zp *= eip
    return amps


def coherent_state_vector(s: float, config: CoherentConfiguration) -> np.ndarray:
    """Normalised product coherent state over the (p1, p2) row-major basis."""
    a1 = site_amplitudes(s, config.n1)
    a2 = site_amplitudes(s, config.n2)
    return np.kron(a1, a2)


_OP_NAMES = ("S+", "S-", "Sz", "Sx", "Sy")


def _site_operators(s: float, hbar: float) -> dict[str, np.ndarray]:
    mats = build_spin_matrices(s, hbar)
    sp, sm = ladder_matrices(s, hbar)
    return {"S+": sp, "S-": sm, "Sz": mats.sz, "Sx": mats.sx, "Sy": mats.sy}


def brute_moment(
    op_product: list[tuple[str, int]],
    s: float,
    config: CoherentConfiguration,
    hbar: float = _CONST.hbar,
) -> complex:
    """<z1 z2| O_1 O_2 ... O_k |z1 z2> by dense operator application.

    Each entry of op_product is (name, site) with name in {S+, S-, Sz, Sx, Sy}
    and site in {1, 2}; operators are applied right to left, as written.
    """
    if not op_product:
        raise ValueError("operator product must not be empty")
    if len(op_product) > MAX_PRODUCT_LENGTH:
        raise ValueError(f"operator products are capped at length {MAX_PRODUCT_LENGTH}")
    if s > MAX_SPIN:
        raise ValueError(f"brute_moment supports s <= {MAX_SPIN}")
    ops = _site_operators(s, hbar)
    dim = int(round(2 * s)) + 1
    psi = coherent_state_vector(s, config).reshape(dim, dim)
    vec = psi.copy()
    for name, site in reversed(op_product):
        if name not in _OP_NAMES:
            raise ValueError(f"unknown operator {name!r}")
        if site == 1:
            vec = ops[name] @ vec
        elif site == 2:
            vec = vec @ ops[name].T
        else:
            raise ValueError(f"site must be 1 or 2, got {site}")
    return complex(np.vdot(psi, vec))


ANALYTIC_KINDS = (
    "Sz", "Sz2", "Sp2", "Sm2", "SpSm", "SpSz", "SmSz",
    "Sz3", "SpSmSz", "SmSmSz", "SpSpSz", "SpSzSz", "SmSzSz",
    "SpSpSm", "SpSmSm", "SpN", "SmN",
)

# Operator sequences matching each closed form, for cross-validation.
KIND_OPERATORS = {
    "Sz": [("Sz", 1)],
    "Sz2": [("Sz", 1), ("Sz", 1)],
    "Sp2": [("S+", 1), ("S+", 1)],
    "Sm2": [("S-", 1), ("S-", 1)],
    "SpSm": [("S+", 1), ("S-", 1)],
    "SpSz": [("S+", 1), ("Sz", 1)],
    "SmSz": [("S-", 1), ("Sz", 1)],
    "Sz3": [("Sz", 1), ("Sz", 1), ("Sz", 1)],
    "SpSmSz": [("S+", 1), ("S-", 1), ("Sz", 1)],
    "SmSmSz": [("S-", 1), ("S-", 1), ("Sz", 1)],
    "SpSpSz": [("S+", 1), ("S+", 1), ("Sz", 1)],
    "SpSzSz": [("S+", 1), ("Sz", 1), ("Sz", 1)],
    "SmSzSz": [("S-", 1), ("Sz", 1), ("Sz", 1)],
    "SpSpSm": [("S+", 1), ("S+", 1), ("S-", 1)],
    "SpSmSm": [("S+", 1), ("S-", 1), ("S-", 1)],
}


def analytic_moment(
    kind: str,
    s: float,
    z: complex,
    N: int | None = None,
    hbar: float = _CONST.hbar,
) -> complex:
    """Closed-form single-site coherent-state moments.

    kind selects among the moments of S+^k1 S-^k2 Sz^k3 with k1+k2+k3 <= 3
    plus the all-N ladder moments 'SpN'/'SmN' (which require N).
    """
    if kind not in ANALYTIC_KINDS:
        raise ValueError(f"unknown analytic moment kind {kind!r}")
    z = complex(z)
    zb = z.conjugate()
    a = abs(z) ** 2
    d = 1.0 + a
    hs = hbar * s

    if kind == "Sz":
        return hs * (1.0 - a) / d
    if kind == "Sz2":
        return hs ** 2 * (((1.0 - a) / d) ** 2 + (2.0 / s) * a / d ** 2)
    if kind == "Sp2":
        return hs ** 2 * (4.0 - 2.0 / s) * z ** 2 / d ** 2
    if kind == "Sm2":
        return hs ** 2 * (4.0 - 2.0 / s) * zb ** 2 / d ** 2
    if kind == "SpSm":
        return hs ** 2 * (2.0 * a + 1.0 / s) * 2.0 / d ** 2
    if kind == "SmSz":
        return hs ** 2 * (1.0 - a + a / s) * 2.0 * zb / d ** 2
    if kind == "SpSz":
        return hs ** 2 * (1.0 - a - 1.0 / s) * 2.0 * z / d ** 2
    if kind == "Sz3":
        return -hbar ** 3 * (
            s * (a - 1.0) * (s ** 2 * (a ** 2 + 1.0) - 2.0 * ((s - 3.0) * s + 1.0) * a)
        ) / d ** 3
    if kind == "SpSmSz":
        return hbar ** 3 * (
            2.0 * s * (-2.0 * (s - 1.0) * s * a ** 2 + (s * (2.0 * s - 3.0) + 2.0) * a + s)
        ) / d ** 3
    if kind == "SmSmSz":
        return -hbar ** 3 * (2.0 * s * (2.0 * s - 1.0) * zb ** 2 * ((s - 2.0) * a - s)) / d ** 3
    if kind == "SpSpSz":
        return -hbar ** 3 * (2.0 * s * (2.0 * s - 1.0) * z ** 2 * (s * a - s + 2.0)) / d ** 3
    if kind == "SpSzSz":
        return hbar ** 3 * (
            2.0 * s * z * (s ** 2 * a ** 2 + (-2.0 * (s - 2.0) * s - 1.0) * a + (s - 1.0) ** 2)
        ) / d ** 3
    if kind == "SmSzSz":
        return hbar ** 3 * (
            2.0 * s * zb * ((s - 1.0) ** 2 * a ** 2 + (-2.0 * (s - 2.0) * s - 1.0) * a + s ** 2)
        ) / d ** 3
    if kind == "SpSpSm":
        return hbar ** 3 * (4.0 * s * (2.0 * s - 1.0) * z * (s * a + 1.0)) / d ** 3
    if kind == "SpSmSm":
        return hbar ** 3 * (4.0 * s * (2.0 * s - 1.0) * zb * (s * a + 1.0)) / d ** 3

    # N-th order ladder moments: (2s)!/(2s-N)! z^N / (1+|z|^2)^N, zero past N=2s.
    if N is None or N < 1:
        raise ValueError("kinds 'SpN'/'SmN' require an order N >= 1")
    two_s = int(round(2 * s))
    if N > two_s:
        return 0.0 + 0.0j
    fact = 1.0
    for k in range(N):
        fact *= two_s - k
    core = fact / d ** N
    if kind == "SpN":
        return hbar ** N * core * z ** N
    return hbar ** N * core * zb ** N
