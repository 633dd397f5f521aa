"""Path-integral spin dynamics for two exchange-coupled spins.

Quantum thermal expectation values by exact diagonalisation, and their
reproduction through classical stochastic Landau-Lifshitz-Gilbert dynamics
driven by quantum-corrected effective fields built from spin-coherent-state
partition functions.
"""

from .coherent import (
    CoherentConfiguration,
    PoleSingularityError,
    analytic_moment,
    bloch_to_stereo,
    brute_moment,
    coherent_state_vector,
    stereo_to_bloch,
)
from .constants import PhysicalConstants, SpinSystemSpec
from .effective import (
    EffectiveFieldModel,
    FieldSample,
    SeriesDomainError,
    classical_energy,
    make_model,
)
from .harness import (
    SweepConfig,
    SweepResult,
    SweepRow,
    classical_reference_quadrature,
    convergence_diagnostic,
    run_ed_sweep,
    run_temperature_sweep,
    thermal_average,
)
from .quantum import (
    EigenSystem,
    SpinMatrices,
    TwoSpinHamiltonian,
    build_spin_matrices,
    build_two_spin_hamiltonian,
    clebsch_gordan,
    closed_form_sz_half,
    eigendecompose,
    thermal_expectation_sz,
)
from .sllg import NoiseSettings, SimState, llg_drift, simulate, step

__version__ = "0.1.0"
