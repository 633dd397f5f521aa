import math

import numpy as np
import pytest
from scipy import stats

from pisd.constants import SpinSystemSpec
from pisd.coherent import CoherentConfiguration
from pisd.effective import SeriesDomainError, make_model
from pisd.sllg import NoiseSettings, SimState, llg_drift, simulate, step

from conftest import CONST, GMUB, make_spec

GAMMA = CONST.gamma
NORTH = np.array([0.0, 0.0, 1.0])
XAXIS = np.array([1.0, 0.0, 0.0])


def _noise(spec, T, seed=1, realization_index=0):
    return NoiseSettings(alpha=spec.alpha, T=T, mu_s=spec.mu_s, gamma=GAMMA,
                         seed=seed, realization_index=realization_index)


def test_drift_parallel_vanishes():
    b = np.array([0.0, 0.0, 2.0])
    assert np.abs(llg_drift(NORTH, b, 0.5, GAMMA)).max() == 0.0


def test_drift_larmor_rate():
    b = np.array([0.0, 0.0, 1.0])
    rate = llg_drift(XAXIS, b, 0.0, GAMMA)
    assert abs(np.linalg.norm(rate) - GAMMA * 1.0) <= 1e-6 * GAMMA


def test_drift_orthogonal_to_spin():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        b = rng.standard_normal(3)
        assert abs(np.dot(n, llg_drift(n, b, 0.7, GAMMA))) <= 1e-9 * GAMMA * np.linalg.norm(b)


def test_step_norm_preservation_and_dt_validation():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    model = make_model("eigen-overlap", spec, T=4.0)
    noise = _noise(spec, 4.0)
    state = SimState(CoherentConfiguration(XAXIS, NORTH), 0.0)
    for _ in range(20):
        state = step(state, model, noise, 5e-15,
                     eta=np.random.default_rng(3).standard_normal((2, 3)) * noise.sigma(5e-15))
        for n in (state.config.n1, state.config.n2):
            assert abs(1.0 - np.linalg.norm(n)) <= 1e-12
    with pytest.raises(ValueError):
        step(state, model, noise, 0.0)


def test_relaxation_to_field_axis():
    # T=0 (noise off), alpha=0.5, J=0: damped precession onto the field axis.
    spec = SpinSystemSpec(s=0.5, J=0.0, B=(0.0, 0.0, 1.0), alpha=0.5)
    model = make_model("classical", spec)
    noise = _noise(spec, 0.0)
    initial = SimState(CoherentConfiguration(XAXIS, np.array([0.0, 1.0, 0.0])), 0.0)
    final = None
    for final in simulate(initial, model, noise, 5e-15, 1e-9, record_every=200000):
        pass
    assert final.config.n1[2] > 0.9999
    assert final.config.n2[2] > 0.9999


def test_energy_conservation_pure_precession():
    # noise off, alpha=0, J=0: Zeeman energy conserved to 1e-8 relative
    # over 1e5 steps at dt = 5e-6 ns.
    spec = SpinSystemSpec(s=0.5, J=0.0, B=(0.0, 0.0, 1.0), alpha=0.0)
    model = make_model("classical", spec)
    noise = _noise(spec, 0.0)
    n0 = np.array([math.sin(1.0), 0.0, math.cos(1.0)])
    initial = SimState(CoherentConfiguration(n0, n0.copy()), 0.0)

    def zeeman(config):
        return -GMUB * spec.s * 1.0 * (config.n1[2] + config.n2[2])

    e0 = zeeman(initial.config)
    final = None
    for final in simulate(initial, model, noise, 5e-15, 1e5 * 5e-15, record_every=100000):
        pass
    assert abs(zeeman(final.config) - e0) <= 1e-8 * abs(e0)


def test_noise_moments():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0, alpha=0.5)
    T, dt = 5.0, 5e-15
    noise = _noise(spec, T, seed=99)
    sigma = noise.sigma(dt)
    target_var = 2 * spec.alpha / ((1.0 / (CONST.k_B * T)) * spec.mu_s * GAMMA * dt)
    assert abs(sigma ** 2 - target_var) <= 1e-12 * target_var
    draws = noise.generator().standard_normal((10 ** 6, 3)) * sigma
    mean = draws.mean(axis=0)
    var = draws.var(axis=0)
    assert np.abs(mean).max() <= 3 * sigma / math.sqrt(10 ** 6)
    assert np.abs(var - target_var).max() <= 0.01 * target_var


def test_noise_off_cases():
    spec = make_spec(alpha=0.5)
    assert _noise(spec, 0.0).sigma(5e-15) == 0.0
    spec0 = make_spec(alpha=0.0)
    assert NoiseSettings(alpha=0.0, T=5.0, mu_s=spec0.mu_s, gamma=GAMMA, seed=0).sigma(5e-15) == 0.0
    with pytest.raises(ValueError):
        NoiseSettings(alpha=0.5, T=-1.0, mu_s=spec.mu_s, gamma=GAMMA, seed=0).sigma(5e-15)


def test_simulate_deterministic():
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0)
    model = make_model("eigen-overlap", spec, T=4.0)
    initial = SimState(CoherentConfiguration(XAXIS, NORTH), 0.0)

    def final_state(chunk):
        noise = _noise(spec, 4.0, seed=7, realization_index=3)
        last = None
        for last in simulate(initial, model, noise, 5e-15, 2e-12,
                             record_every=100, chunk_steps=chunk):
            pass
        return last

    a, b = final_state(65536), final_state(97)
    assert np.array_equal(a.config.n1, b.config.n1)
    assert np.array_equal(a.config.n2, b.config.n2)
    assert a.time == b.time


def test_simulate_zero_steps():
    spec = make_spec()
    model = make_model("classical", spec)
    initial = SimState(CoherentConfiguration(XAXIS, NORTH), 0.0)
    assert list(simulate(initial, model, _noise(spec, 1.0), 5e-15, 0.0)) == []


def test_realizations_same_distribution():
    # Different realization indices sample the same stationary distribution.
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0, alpha=0.5)
    model = make_model("classical", spec)
    initial = SimState(CoherentConfiguration(XAXIS, NORTH), 0.0)

    def samples(idx):
        noise = _noise(spec, 5.0, seed=21, realization_index=idx)
        out = []
        for st_ in simulate(initial, model, noise, 5e-15, 1.5e-9, record_every=2000):
            out.append(st_.config.n1[2])
        return np.array(out[30:])  # drop equilibration

    a, b = samples(0), samples(1)
    assert not np.array_equal(a, b)
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_domain_error_carries_context():
    spec = make_spec(s=2.0, j_over=1.0, bz=1.0)
    model = make_model("series-exact", spec, T=1.0, order=3)
    state = SimState(
        CoherentConfiguration(np.array([1.0, 0, 0]), np.array([-1.0, 0, 0])), 0.0
    )
    noise = _noise(spec, 1.0)
    with pytest.raises(SeriesDomainError, match="T=1.0"):
        step(state, model, noise, 5e-15)


def test_dt_robustness_classical():
    # Halving dt changes <n_z> by less than the statistical error at T = 5 K.
    spec = make_spec(s=0.5, j_over=1.0, bz=1.0, alpha=0.5)
    model = make_model("classical", spec)
    initial = SimState(CoherentConfiguration(XAXIS, NORTH), 0.0)

    def mean_nz(dt, idx):
        noise = _noise(spec, 5.0, seed=5, realization_index=idx)
        vals = []
        for st_ in simulate(initial, model, noise, dt, 2e-9, record_every=500):
            if st_.time > 0.5e-9:
                vals.append(0.5 * (st_.config.n1[2] + st_.config.n2[2]))
        return float(np.mean(vals))

    coarse = [mean_nz(5e-15, i) for i in range(4)]
    fine = [mean_nz(2.5e-15, i + 100) for i in range(4)]
    err = math.sqrt(np.var(coarse, ddof=1) / 4 + np.var(fine, ddof=1) / 4)
    assert abs(np.mean(coarse) - np.mean(fine)) <= 3 * err
