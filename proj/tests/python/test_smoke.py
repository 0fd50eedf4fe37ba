"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import rbmtomo as rt


def test_hamiltonian_and_ground_state():
    params = rt.HamiltonianParams(n_sites=2, v_nn=30.0, omega=0.0, delta=0.0)
    h = rt.build_hamiltonian(params)
    assert np.allclose(np.diag(h), [0.0, 0.0, 0.0, 30.0])

    params = rt.HamiltonianParams(n_sites=2, v_nn=30.0, omega=0.0, delta=-1.0)
    state, energy, gap, degenerate = rt.ground_state(params)
    assert abs(energy) < 1e-12
    assert not degenerate
    assert abs(state.probabilities()[0] - 1.0) < 1e-12


def test_z2_state_and_entropies():
    z2 = rt.approx_z2_state()
    p = z2.probabilities()
    assert abs(p[0b10100101] - 0.5) < 1e-12
    i2 = rt.mutual_information_exact(z2, 3, 2)
    assert abs(i2 - 2.0 * -math.log(0.625)) < 1e-9

    partner = rt.positive_pure_partner(z2)
    assert rt.fidelity(partner, z2) == pytest.approx(1.0)


def test_sampling_and_fd():
    z2 = rt.approx_z2_state()
    samples = rt.sample_measurements(z2, 2000, seed=7)
    assert len(samples) == 2000
    assert all(len(s) == 8 for s in samples)
    assert samples == rt.sample_measurements(z2, 2000, seed=7)

    f = rt.fd_fidelity(samples, z2)
    assert 0.9 < f <= 1.0
    assert rt.fd_model_size(samples) <= 3  # the state has three configurations
    assert rt.fidelity_bound(100, 0.0) == pytest.approx(10.0)


def test_rbm_and_noise():
    rbm = rt.RbmParams.init(3, 4, seed=1)
    assert rt.probability_exact(rbm, "000") == pytest.approx(1.0 / 8.0, rel=0.1)
    table = rt.probability_table(rbm)
    assert table.sum() == pytest.approx(1.0)

    noise = rt.NoiseModel(p10=0.01, p01=0.04)
    assert rt.channel_prob("0", "1", noise) == pytest.approx(0.04)
    w, bs, bt = rt.effective_couplings(noise)
    assert w == pytest.approx(math.log(0.96 * 0.99 / (0.01 * 0.04)))

    noisy = rt.corrupt_dataset(["111111"] * 100, noise, seed=3)
    assert len(noisy) == 100


def test_training_round_trip():
    z2 = rt.approx_z2_state()
    samples = rt.sample_measurements(z2, 500, seed=21)
    cfg = rt.TrainConfig()
    cfg.n_hidden = 8
    cfg.epochs = 60
    cfg.cd_steps = 5
    cfg.batch_size = 50
    cfg.seed = 3
    out = rt.train(samples, cfg)
    model = out["final_params"]
    assert model.n_visible == 8
    assert out["nll"][-1] < out["nll"][0]

    gzz = rt.avg_correlator(model, 1)
    assert gzz["method"] == "exact"
    assert -1.0 <= gzz["value"] <= 1.0


def test_lindblad_short_evolution():
    params = rt.HamiltonianParams(n_sites=2, v_nn=30.0, omega=2.0, delta=0.0)
    sweep = rt.default_sweep(total_time_us=0.2, n_checkpoints=2)
    lb = rt.LindbladParams(gamma_rg=1 / 80.0, gamma_gg=1 / 40.0,
                           doppler_rms_mhz=0.0, n_disorder=1)
    psi0 = np.zeros(4, dtype=complex)
    psi0[0] = 1.0
    initial = rt.QuantumState.pure(2, psi0)
    states = rt.evolve_lindblad(initial, sweep, params, lb, np.zeros(2))
    assert len(states) == 2
    for s in states:
        assert s.density_matrix().trace() == pytest.approx(1.0, abs=1e-6)
        assert s.purity() <= 1.0 + 1e-9
