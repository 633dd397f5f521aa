import math

import numpy as np
import pytest

from pisd.constants import PhysicalConstants, SpinSystemSpec
from pisd.quantum import (
    build_spin_matrices,
    build_two_spin_hamiltonian,
    clebsch_gordan,
    closed_form_sz_half,
    eigendecompose,
    thermal_expectation_sz,
)

from conftest import CONST, GMUB, HBAR, make_spec


@pytest.mark.parametrize("s", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_spin_matrices_su2_algebra(s):
    m = build_spin_matrices(s)
    tol = 1e-12 * HBAR ** 2
    for a, b, c in ((m.sx, m.sy, m.sz), (m.sy, m.sz, m.sx), (m.sz, m.sx, m.sy)):
        assert np.abs(a @ b - b @ a - 1j * HBAR * c).max() <= tol
    for op in (m.sx, m.sy, m.sz):
        assert np.abs(op - op.conj().T).max() <= tol


def test_spin_matrices_half_is_pauli():
    m = build_spin_matrices(0.5)
    assert np.allclose(m.sz, HBAR / 2 * np.diag([1, -1]))
    assert np.allclose(m.sx, HBAR / 2 * np.array([[0, 1], [1, 0]]))
    assert np.allclose(m.sy, HBAR / 2 * np.array([[0, -1j], [1j, 0]]))


def test_spin_matrices_s1_sz():
    m = build_spin_matrices(1.0)
    assert np.allclose(m.sz, HBAR * np.diag([1, 0, -1]))


def test_sz_eigenvalues_full_ladder():
    for s in (0.5, 1.5, 2.0):
        m = build_spin_matrices(s)
        expect = HBAR * np.arange(-s, s + 1)
        assert np.allclose(np.sort(np.linalg.eigvalsh(m.sz)), expect)


def test_invalid_spin_rejected():
    for bad in (0.3, -0.5, 0.0):
        with pytest.raises(ValueError):
            build_spin_matrices(bad)


def test_hamiltonian_product_basis_matrix():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    h = build_two_spin_hamiltonian(spec).matrix
    J = spec.J
    zee = GMUB * 1.0
    expect = np.array(
        [
            [-zee - J / 4, 0, 0, 0],
            [0, J / 4, -J / 2, 0],
            [0, -J / 2, J / 4, 0],
            [0, 0, 0, zee - J / 4],
        ]
    )
    assert np.abs(h - expect).max() <= 1e-12 * np.abs(expect).max()


def test_hamiltonian_zero_inputs():
    spec = SpinSystemSpec(s=0.5, J=0.0, B=(0.0, 0.0, 0.0))
    h = build_two_spin_hamiltonian(spec).matrix
    assert np.abs(h).max() == 0.0


def test_hamiltonian_b_zero_spectrum():
    spec = SpinSystemSpec(s=0.5, J=GMUB, B=(0.0, 0.0, 0.0))
    lam = np.sort(np.linalg.eigvalsh(build_two_spin_hamiltonian(spec).matrix))
    expect = np.array([-0.25, -0.25, -0.25, 0.75]) * GMUB
    assert np.allclose(lam, expect, atol=1e-12 * GMUB)


def test_hamiltonian_hermitian_general_field():
    spec = SpinSystemSpec(s=1.0, J=GMUB, B=(0.3, -0.2, 0.9))
    h = build_two_spin_hamiltonian(spec).matrix
    assert np.abs(h - h.conj().T).max() <= 1e-12 * np.abs(h).max()


def test_eigendecompose_spectrum():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    J, zee = spec.J, GMUB
    expect = np.sort([-zee - J / 4, -J / 4, zee - J / 4, 0.75 * J])
    assert np.allclose(eig.eigenvalues, expect, atol=1e-12 * GMUB)


def test_eigendecompose_reconstruction_and_orthonormal():
    spec = SpinSystemSpec(s=1.5, J=-2 * GMUB, B=(0.1, 0.2, 0.8))
    h = build_two_spin_hamiltonian(spec).matrix
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    v, lam = eig.eigenvectors, eig.eigenvalues
    recon = v @ np.diag(lam) @ v.conj().T
    assert np.abs(recon - h).max() <= 1e-10 * np.abs(h).max()
    gram = v.conj().T @ v
    assert np.abs(gram - np.eye(len(lam))).max() <= 1e-12


def test_eigendecompose_degenerate_orthonormal():
    spec = SpinSystemSpec(s=0.5, J=GMUB, B=(0.0, 0.0, 0.0))
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    gram = eig.eigenvectors.conj().T @ eig.eigenvectors
    assert np.abs(gram - np.eye(4)).max() <= 1e-12


def test_eigendecompose_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_thermal_sz_matches_closed_form_wide():
    temps = np.geomspace(0.05, 50.0, 50)
    for j_over in (0.0, 1.0, -1.0, 2.0, -2.0):
        spec = make_spec(s=0.5, j_over=j_over, bz=1.0)
        eig = eigendecompose(build_two_spin_hamiltonian(spec))
        for T in temps:
            got = thermal_expectation_sz(eig, T, spec)
            ref = closed_form_sz_half(T, spec.J, 1.0)
            assert abs(got - ref) <= 1e-10 * abs(ref)


def test_thermal_sz_limits():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    assert abs(thermal_expectation_sz(eig, 1e6, spec)) <= 1e-4 * HBAR
    assert abs(thermal_expectation_sz(eig, 0.01, spec) - HBAR / 2) <= 1e-6 * HBAR


def test_thermal_sz_shift_invariance():
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    h = build_two_spin_hamiltonian(spec).matrix
    base = thermal_expectation_sz(eigendecompose(h), 2.0, spec)
    shifted = thermal_expectation_sz(
        eigendecompose(h + 10 * GMUB * np.eye(h.shape[0])), 2.0, spec
    )
    assert abs(base - shifted) <= 1e-12 * abs(base)


def test_closed_form_edges():
    assert closed_form_sz_half(3.0, GMUB, 0.0) == 0.0
    assert abs(closed_form_sz_half(0.001, GMUB, 1.0) - HBAR / 2) <= 1e-9 * HBAR
    got = closed_form_sz_half(1.0, GMUB, 1.0) / HBAR
    assert abs(got - 0.33377888073729445) <= 1e-12
    with pytest.raises(ValueError):
        closed_form_sz_half(0.0, GMUB, 1.0)
    with pytest.raises(ValueError):
        closed_form_sz_half(-1.0, GMUB, 1.0)


def test_clebsch_gordan_singlet_and_stretched():
    r = 1 / math.sqrt(2)
    assert abs(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0) - r) <= 1e-15
    assert abs(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) + r) <= 1e-15
    assert clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 1) == 1.0
    assert clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 0) == 0.0


def test_clebsch_gordan_unitarity():
    for j1, j2 in ((0.5, 0.5), (1.0, 0.5), (1.0, 1.0)):
        for m1 in np.arange(-j1, j1 + 1):
            for m2 in np.arange(-j2, j2 + 1):
                total = 0.0
                S = abs(j1 - j2)
                while S <= j1 + j2 + 1e-9:
                    M = m1 + m2
                    if abs(M) <= S + 1e-9:
                        total += clebsch_gordan(j1, m1, j2, m2, S, M) ** 2
                    S += 1.0
                assert abs(total - 1.0) <= 1e-12


def test_clebsch_gordan_rejects_bad_quantum_numbers():
    with pytest.raises(ValueError):
        clebsch_gordan(0.5, 1.5, 0.5, 0.5, 1, 1)
    with pytest.raises(ValueError):
        clebsch_gordan(0.5, 0.5, 0.5, 0.5, 3, 1)


def test_clebsch_gordan_basis_change_diagonalises():
    # Rotating the s=1/2 product-basis Hamiltonian by the total-spin unitary
    # must produce the diagonal coupled-basis form.
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    h = build_two_spin_hamiltonian(spec).matrix
    # Product basis rows: (p1,p2) with p = 1/2 - m; coupled columns (S, M).
    coupled = [(1, 1), (1, 0), (1, -1), (0, 0)]
    u = np.zeros((4, 4))
    for i, (p1, p2) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        m1, m2 = 0.5 - p1, 0.5 - p2
        for j, (S, M) in enumerate(coupled):
            u[i, j] = clebsch_gordan(0.5, m1, 0.5, m2, S, M)
    rotated = u.T @ h @ u
    J, zee = spec.J, GMUB
    expect = np.diag([-J / 4 - zee, -J / 4, -J / 4 + zee, 0.75 * J])
    assert np.abs(rotated - expect).max() <= 1e-12 * np.abs(expect).max()
