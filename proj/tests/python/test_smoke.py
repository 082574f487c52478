"""End-to-end smoke checks for the python bindings.

Runs only when the compiled module is importable; point PYTHONPATH at the
build output (build/python) or install the wheel first.
"""

import numpy as np
import pytest

colliq = pytest.importorskip("colliq")


@pytest.fixture(scope="module")
def two_channel():
    channels = colliq.ChannelSet(["g", "e"], np.array([0.0, 0.4]))
    gas = colliq.GasParameters(0.05, 1.0, 1.5)
    model = colliq.SWaveKMatrixModel(
        channels, np.array([[0.8, 0.3], [0.3, -0.5]]), gas.m
    )
    quad = colliq.QuadratureConfig()
    quad.n_v = 64
    quad.n_cos = 16
    return channels, gas, model, quad


def test_channel_set_basics(two_channel):
    channels, _, _, _ = two_channel
    assert channels.count() == 2
    assert channels.index_of("e") == 1
    assert list(channels.labels) == ["g", "e"]


def test_unitarity_and_optical_theorem(two_channel):
    _, _, model, _ = two_channel
    for e_total in (0.6, 1.3, 2.8):
        s = model.s_matrix_at_energy(e_total)
        assert np.linalg.norm(s @ s.conj().T - np.eye(len(s))) < 1e-12
        for entrance in range(2):
            assert model.optical_theorem_residual(entrance, e_total) < 1e-10


def test_rate_tensor_structure(two_channel):
    channels, gas, model, quad = two_channel
    rates = colliq.rate_tensor(model, gas, quad)
    n = channels.count()
    entries = np.asarray(rates.entries).reshape(n, n, n, n)

    diag = colliq.validate_rate_tensor(rates)
    assert diag.chi_violation == 0.0
    assert diag.hermiticity_residual < 1e-12
    assert diag.psd_min_eig >= -1e-10 * max(1.0, diag.coefficient_norm)

    coeff = np.asarray(colliq.coefficient_matrix(rates))
    assert np.linalg.norm(coeff - coeff.conj().T) < 1e-12 * max(
        1.0, np.abs(coeff).max()
    )
    assert np.linalg.eigvalsh(coeff).min() >= -1e-10 * max(1.0, np.abs(coeff).max())

    for a in range(n):
        for b in range(n):
            for a0 in range(n):
                for b0 in range(n):
                    assert entries[a, b, a0, b0] == rates.at(a, b, a0, b0)
                    if not rates.chi_at(a, b, a0, b0):
                        assert entries[a, b, a0, b0] == 0.0

    single = colliq.rate_coefficient(model, gas, 0, 0, 0, 0, quad)
    assert abs(single - entries[0, 0, 0, 0]) <= 1e-8 * max(1.0, abs(single))


def test_assemble_and_propagate(two_channel):
    channels, gas, model, quad = two_channel
    rates = colliq.rate_tensor(model, gas, quad)
    shifts = colliq.energy_shifts(model, gas, quad)
    gen = colliq.assemble(channels, shifts, rates)

    assert gen.hamiltonian.shape == (2, 2)
    assert np.allclose(np.diag(gen.hamiltonian), gen.shifted_energies)

    rho0 = np.array([[0.6, 0.2], [0.2, 0.4]], dtype=complex)
    horizon = 0.5 / max(np.abs(np.diag(gen.loss)).max(), 1e-12)
    t_grid = [k * horizon / 4.0 for k in range(5)]
    record = colliq.propagate(gen, rho0, t_grid)

    assert record.completed
    assert max(record.trace_errors) < 1e-10
    assert min(record.min_eigenvalues) > -1e-10
    assert record.integrator_mismatch < 1e-6


def test_jump_ensemble_matches_master_equation(two_channel):
    channels, gas, model, quad = two_channel
    rates = colliq.rate_tensor(model, gas, quad)
    shifts = colliq.energy_shifts(model, gas, quad)
    gen = colliq.assemble(channels, shifts, rates)
    ops = colliq.lindblad_operators(rates, shifts)

    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    horizon = 0.5 / max(np.abs(np.diag(gen.loss)).max(), 1e-12)
    t_grid = [0.0, 0.5 * horizon, horizon]

    exact = colliq.propagate(gen, rho0, t_grid)
    config = colliq.EnsembleConfig()
    config.n_traj = 400
    config.master_seed = 7
    ensemble = colliq.ensemble_average(ops, rho0, t_grid, config)

    for k in range(len(t_grid)):
        gap = np.abs(np.asarray(ensemble.mean[k]) - np.asarray(exact.states[k]))
        sigma = np.hypot(
            np.asarray(ensemble.stderr_re[k]), np.asarray(ensemble.stderr_im[k])
        )
        assert (gap <= 4.0 * sigma + 1e-12).all()


def test_error_translation(tmp_path):
    with pytest.raises(colliq.ConfigError):
        colliq.read_amplitude_table(str(tmp_path / "missing.json"), 1.0)
    with pytest.raises(ValueError):
        colliq.ChannelSet(["a", "a"], np.array([0.0, 1.0]))
