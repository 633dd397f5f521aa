import math

import numpy as np
import pytest

from pisd.constants import SpinSystemSpec
from pisd.coherent import CoherentConfiguration, brute_moment
from pisd.effective import (
    VARIANTS,
    SeriesDomainError,
    classical_energy,
    kernel_energy,
    kernel_field,
    make_model,
)
from pisd.quantum import EigenSystem, build_two_spin_hamiltonian, eigendecompose

from conftest import GMUB, make_spec, random_unit

NORTH = np.array([0.0, 0.0, 1.0])


def _random_config(rng):
    return CoherentConfiguration(random_unit(rng, False), random_unit(rng, False))


# ---- classical energy ----------------------------------------------------


def test_classical_energy_aligned():
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    cfg = CoherentConfiguration(NORTH, NORTH)
    expect = -spec.J * spec.s ** 2 - 2 * GMUB * spec.s * 1.0
    assert abs(classical_energy(spec, cfg) - expect) <= 1e-12 * abs(expect)


def test_classical_energy_antialigned_perp():
    spec = make_spec(s=1.5, j_over=1.0, bz=1.0)
    cfg = CoherentConfiguration(np.array([1.0, 0, 0]), np.array([-1.0, 0, 0]))
    expect = spec.J * spec.s ** 2
    assert abs(classical_energy(spec, cfg) - expect) <= 1e-12 * abs(expect)


def test_classical_energy_j_zero_separable():
    spec = SpinSystemSpec(s=1.0, J=0.0, B=(0.0, 0.0, 1.0))
    rng = np.random.default_rng(2)
    n1, n2 = random_unit(rng), random_unit(rng)
    total = classical_energy(spec, CoherentConfiguration(n1, n2))
    e1 = classical_energy(spec, CoherentConfiguration(n1, NORTH))
    e2 = classical_energy(spec, CoherentConfiguration(NORTH, n2))
    e_north = classical_energy(spec, CoherentConfiguration(NORTH, NORTH))
    assert abs(total - (e1 + e2 - e_north)) <= 1e-12 * abs(e_north)


# ---- series F ---------------------------------------------------------------


def test_series_f_order_one_is_minus_beta_mean_energy():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    model = make_model("series-exact", spec, T=2.0, order=1)
    rng = np.random.default_rng(3)
    cfg = _random_config(rng)
    # <H> from single-site coherent-state moments of the exchange + Zeeman terms.
    h = build_two_spin_hamiltonian(spec).matrix
    from pisd.coherent import coherent_state_vector

    psi = coherent_state_vector(spec.s, cfg)
    mean_h = float(np.vdot(psi, h @ psi).real)
    got = model.series_F(cfg)
    assert abs(got - (-model.beta * mean_h)) <= 1e-12 * abs(model.beta * mean_h)


def test_series_f_vanishes_at_infinite_temperature():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    model = make_model("series-exact", spec, T=1e15, order=4)
    rng = np.random.default_rng(4)
    assert abs(model.series_F(_random_config(rng))) <= 1e-10


def test_series_f_order_30_matches_eigen_overlap():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    model = make_model("series-exact", spec, T=2.0, order=30)
    overlap = make_model("eigen-overlap", spec, T=2.0)
    rng = np.random.default_rng(5)
    beta = model.beta
    for _ in range(10):
        cfg = _random_config(rng)
        one_plus_f = 1.0 + model.series_F(cfg)
        ref = math.exp(-beta * overlap.energy(cfg))
        assert abs(one_plus_f - ref) <= 1e-10 * abs(ref)


def test_series_requires_positive_order():
    spec = make_spec()
    with pytest.raises(ValueError):
        make_model("series-exact", spec, T=2.0, order=0)


# ---- effective Hamiltonian ------------------------------------------------


def test_eigen_overlap_high_t_limit_is_mean_energy():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    model = make_model("eigen-overlap", spec, T=1e6)
    h = build_two_spin_hamiltonian(spec).matrix
    from pisd.coherent import coherent_state_vector

    rng = np.random.default_rng(6)
    for _ in range(5):
        cfg = _random_config(rng)
        psi = coherent_state_vector(spec.s, cfg)
        mean_h = float(np.vdot(psi, h @ psi).real)
        assert abs(model.energy(cfg) - mean_h) <= 1e-4 * abs(mean_h)


def test_eigen_overlap_matches_matrix_exponential():
    from scipy.linalg import expm
    from pisd.coherent import coherent_state_vector

    rng = np.random.default_rng(7)
    for s in (0.5, 1.0, 2.0):
        spec = make_spec(s=s, j_over=1.0, bz=1.0)
        for T in (1.0, 10.0):
            model = make_model("eigen-overlap", spec, T=T)
            em = expm(-model.beta * model.hamiltonian.matrix)
            for _ in range(5):
                cfg = _random_config(rng)
                psi = coherent_state_vector(s, cfg)
                ref = -math.log(np.vdot(psi, em @ psi).real) / model.beta
                assert abs(model.energy(cfg) - ref) <= 1e-10 * abs(ref)


def test_series_high_t_order_one_is_mean_energy():
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    model = make_model("series-high-t", spec, T=5.0, order=1)
    h = build_two_spin_hamiltonian(spec).matrix
    from pisd.coherent import coherent_state_vector

    rng = np.random.default_rng(8)
    cfg = _random_config(rng)
    psi = coherent_state_vector(spec.s, cfg)
    mean_h = float(np.vdot(psi, h @ psi).real)
    assert abs(model.energy(cfg) - mean_h) <= 1e-12 * abs(mean_h)


def test_series_exact_positivity_domain_error():
    spec = make_spec(s=2.0, j_over=1.0, bz=1.0)
    model = make_model("series-exact", spec, T=1.0, order=3)
    cfg = CoherentConfiguration(np.array([1.0, 0, 0]), np.array([-1.0, 0, 0]))
    with pytest.raises(SeriesDomainError):
        model.energy(cfg)
    assert math.isnan(kernel_energy(model, cfg))


def test_eigen_overlap_requires_axial_field():
    spec = SpinSystemSpec(s=0.5, J=GMUB, B=(0.5, 0.0, 0.5))
    with pytest.raises(ValueError):
        make_model("eigen-overlap", spec, T=2.0)


def test_quantum_variants_require_temperature():
    spec = make_spec()
    with pytest.raises(ValueError):
        make_model("eigen-overlap", spec)
    with pytest.raises(ValueError):
        make_model("unknown-variant", spec, T=1.0)


# ---- effective fields ------------------------------------------------------


def test_classical_field_analytic():
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    model = make_model("classical", spec)
    rng = np.random.default_rng(9)
    cfg = _random_config(rng)
    f = model.effective_field(cfg)
    expect1 = (spec.J * spec.s / GMUB) * cfg.n2 + spec.B_vec
    expect2 = (spec.J * spec.s / GMUB) * cfg.n1 + spec.B_vec
    assert np.abs(f.b1 - expect1).max() <= 1e-12
    assert np.abs(f.b2 - expect2).max() <= 1e-12


def test_quantum_field_two_step_fd_crosscheck():
    # 4th-order FD at h=1e-6 must agree with a coarser h'=1e-4 evaluation.
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    model = make_model("eigen-overlap", spec, T=4.0)
    rng = np.random.default_rng(10)
    cfg = _random_config(rng)
    fine = model.effective_field(cfg)
    hp = 1e-4
    mus = spec.mu_s
    for site in (1, 2):
        base = cfg.n1 if site == 1 else cfg.n2
        other = cfg.n2 if site == 1 else cfg.n1
        grad = np.empty(3)
        for c in range(3):
            vals = []
            for off in (-2.0, -1.0, 1.0, 2.0):
                pt = base.copy()
                pt[c] += off * hp
                pt /= np.linalg.norm(pt)
                pair = (pt, other) if site == 1 else (other, pt)
                vals.append(model.energy(CoherentConfiguration(*pair)))
            grad[c] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * hp)
        coarse = -grad / mus
        ref = fine.b1 if site == 1 else fine.b2
        scale = max(np.abs(ref).max(), 1e-30)
        assert np.abs(coarse - ref).max() <= 1e-5 * scale


def test_j_zero_field_site_factorises():
    spec = SpinSystemSpec(s=0.5, J=0.0, B=(0.0, 0.0, 1.0))
    model = make_model("eigen-overlap", spec, T=2.0)
    rng = np.random.default_rng(11)
    n = random_unit(rng)
    m1, m2 = random_unit(rng), random_unit(rng)
    # b1 depends only on n1 when J=0, and both sites see the same field law.
    f_a = model.effective_field(CoherentConfiguration(n, m1))
    f_b = model.effective_field(CoherentConfiguration(n, m2))
    # Tolerance dominated by finite-difference cancellation noise.
    assert np.abs(f_a.b1 - f_b.b1).max() <= 1e-8 * np.abs(f_a.b1).max()
    f_sym = model.effective_field(CoherentConfiguration(n, n))
    assert np.abs(f_sym.b1 - f_sym.b2).max() <= 1e-8 * np.abs(f_sym.b1).max()


# ---- invariants -------------------------------------------------------------


def test_variant_agreement_high_temperature():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    models = [
        make_model("series-exact", spec, T=50.0, order=3),
        make_model("series-high-t", spec, T=50.0, order=3),
        make_model("difference", spec, T=50.0, order=2),
        make_model("eigen-overlap", spec, T=50.0),
    ]
    rng = np.random.default_rng(12)
    for _ in range(50):
        cfg = _random_config(rng)
        vals = [m.energy(cfg) for m in models]
        scale = max(abs(v) for v in vals)
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                assert abs(vals[i] - vals[j]) <= 0.01 * scale


def test_classical_recovery_trend_with_spin():
    # At fixed beta*J*s^2 the quantum correction shrinks as s grows.
    rng = np.random.default_rng(13)
    configs = [_random_config(rng) for _ in range(15)]
    devs = []
    for s in (0.5, 1.0, 2.0, 3.0):
        J = GMUB * 0.25 / s ** 2  # keeps J s^2, hence beta J s^2, fixed
        spec = SpinSystemSpec(s=s, J=J, B=(0.0, 0.0, 0.0))
        model = make_model("eigen-overlap", spec, T=10.0)
        scale = J * s ** 2
        rel = [
            abs(model.energy(cfg) - classical_energy(spec, cfg)) / scale
            for cfg in configs
        ]
        devs.append(np.mean(rel))
    assert all(devs[i + 1] <= devs[i] * (1 + 1e-9) for i in range(len(devs) - 1)), devs


def test_rotational_covariance_about_z():
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    model = make_model("eigen-overlap", spec, T=2.0)
    rng = np.random.default_rng(14)
    cfg = _random_config(rng)
    base = model.energy(cfg)
    for ang in (0.3, 1.7, 4.0):
        c, s_ = math.cos(ang), math.sin(ang)
        rot = np.array([[c, -s_, 0], [s_, c, 0], [0, 0, 1.0]])
        cfg_r = CoherentConfiguration(rot @ cfg.n1, rot @ cfg.n2)
        assert abs(model.energy(cfg_r) - base) <= 1e-10 * abs(base)


def test_exchange_symmetry():
    rng = np.random.default_rng(15)
    spec = make_spec(s=1.0, j_over=1.0, bz=1.0)
    for variant, order in (("classical", 0), ("series-exact", 3),
                           ("series-high-t", 3), ("difference", 2),
                           ("eigen-overlap", 0)):
        model = make_model(variant, spec, T=20.0 if variant != "classical" else None,
                           order=order)
        cfg = _random_config(rng)
        swapped = CoherentConfiguration(cfg.n2, cfg.n1)
        a, b = model.energy(cfg), model.energy(swapped)
        assert abs(a - b) <= 1e-12 * abs(a), variant


def test_degenerate_overlap_invariance():
    # With B=0 the triplet is degenerate; mixing its eigenvectors by any
    # orthogonal rotation must not change the overlap-weighted energy.
    spec = SpinSystemSpec(s=0.5, J=GMUB, B=(0.0, 0.0, 0.0))
    eig = eigendecompose(build_two_spin_hamiltonian(spec))
    rng = np.random.default_rng(16)
    lam = eig.eigenvalues
    v2 = eig.eigenvectors.copy()
    idx = np.where(np.abs(lam - lam[0]) <= 1e-12 * GMUB)[0]
    assert len(idx) == 3
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    v2[:, idx] = v2[:, idx] @ q
    m1 = make_model("eigen-overlap", spec, T=2.0, eig=eig)
    m2 = make_model("eigen-overlap", spec, T=2.0,
                    eig=EigenSystem(eigenvalues=lam, eigenvectors=v2))
    for _ in range(10):
        cfg = _random_config(rng)
        a, b = m1.energy(cfg), m2.energy(cfg)
        assert abs(a - b) <= 1e-10 * abs(a)


# ---- kernel/reference equivalence -------------------------------------------


def test_kernel_matches_reference_path():
    rng = np.random.default_rng(17)
    for s in (0.5, 1.0, 2.0):
        spec = make_spec(s=s, j_over=1.0, bz=1.0)
        for variant in VARIANTS:
            order = 3 if variant != "classical" else 0
            T = 10.0 if variant != "classical" else None
            model = make_model(variant, spec, T=T, order=order)
            for _ in range(5):
                cfg = _random_config(rng)
                try:
                    e_ref = model.energy(cfg)
                except SeriesDomainError:
                    assert math.isnan(kernel_energy(model, cfg))
                    continue
                e_k = kernel_energy(model, cfg)
                assert abs(e_ref - e_k) <= 1e-12 * abs(e_ref)
                f_ref = model.effective_field(cfg)
                f_k = kernel_field(model, cfg)
                scale = max(np.abs(f_ref.b1).max(), np.abs(f_ref.b2).max(), 1e-30)
                assert np.abs(f_ref.b1 - f_k.b1).max() <= 1e-7 * scale
                assert np.abs(f_ref.b2 - f_k.b2).max() <= 1e-7 * scale
