"""Physical constants and the two-spin problem definition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used throughout; energies in Joules, fields in Tesla."""

    k_B: float = 1.380649e-23  # J / K
    mu_B: float = 9.2740100783e-24  # J / T
    g: float = 2.00231930436256
    hbar: float = 1.054571817e-34  # J s

    @property
    def g_mu_B(self) -> float:
        return self.g * self.mu_B

    @property
    def gamma(self) -> float:
        """Gyromagnetic ratio g*mu_B/hbar in rad s^-1 T^-1."""
        return self.g * self.mu_B / self.hbar


def is_half_integer_spin(s: float) -> bool:
    two_s = 2.0 * s
    return two_s >= 1.0 and math.isclose(two_s, round(two_s), abs_tol=1e-12)


@dataclass(frozen=True)
class SpinSystemSpec:
    """Two exchange-coupled spins of equal quantum number s in a field B.

    J > 0 is ferromagnetic, J < 0 antiferromagnetic.  B is a 3-vector in
    Tesla, alpha the dimensionless Gilbert damping.
    """

    s: float
    J: float
    B: tuple[float, float, float]
    alpha: float = 0.5
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if not is_half_integer_spin(self.s):
            raise ValueError(f"s must be a positive half-integer, got {self.s}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if not all(math.isfinite(b) for b in self.B):
            raise ValueError(f"B must be finite, got {self.B}")
        if not math.isfinite(self.J):
            raise ValueError(f"J must be finite, got {self.J}")

    @property
    def dim_site(self) -> int:
        return int(round(2 * self.s)) + 1

    @property
    def dim(self) -> int:
        return self.dim_site ** 2

    @property
    def mu_s(self) -> float:
        """Magnetic moment per site, g*mu_B*s (J/T)."""
        return self.constants.g_mu_B * self.s

    @property
    def B_vec(self) -> np.ndarray:
        return np.asarray(self.B, dtype=float)

    def beta(self, T: float) -> float:
        """Inverse temperature 1/(k_B T) in 1/J."""
        if T <= 0:
            raise ValueError(f"temperature must be positive, got {T}")
        return 1.0 / (self.constants.k_B * T)
