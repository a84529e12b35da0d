import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import unitary_group

from qudit_graphs.core.states import fidelity, ghz_state
from qudit_graphs.device import (
    ChipConfig, NoiseConfig, PhaseShifterCal, PhaseShifterCalibrator, build_qudit_bell,
    compile_measurement_mesh, default_calibrations, fit_calibration, four_p_four_d_config,
    fusion_oracle, fusion_postselect, ghz8_config, ghz_config, mesh_from_shifter_phases,
    mesh_shifter_phases, mesh_to_unitary, noisy_phases, phase_from_voltage, qubits_to_qudit,
    qudit_to_qubits, run_noisy_trials, synthetic_fringe, voltage_from_phase,
)
from qudit_graphs.recipes import four_p_four_d_state


@given(st.integers(0, 3))
def test_qudit_encoding_round_trip(v):
    assert qubits_to_qudit(qudit_to_qubits(v)) == v


def test_qudit_encoding_big_endian():
    assert qudit_to_qubits(2) == (1, 0)
    with pytest.raises(ValueError):
        qudit_to_qubits(4)


def test_bell_from_sources():
    psi = build_qudit_bell({0: 0.0, 3: 0.0})
    assert psi[0] == pytest.approx(1 / np.sqrt(2)) and psi[15] == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ValueError):
        build_qudit_bell({})


@pytest.mark.parametrize("d", [2, 4])
def test_fusion_probability_half(d):
    _, p = fusion_postselect(ghz_config(d))
    assert abs(p - 0.5) < 1e-12


@pytest.mark.parametrize("config", [ghz_config(2), ghz_config(4), ghz8_config(), four_p_four_d_config()])
def test_fusion_matches_fock_oracle(config):
    s, p = fusion_postselect(config)
    so, po = fusion_oracle(config)
    assert p == pytest.approx(po, abs=1e-9)
    assert fidelity(s, so) == pytest.approx(1, abs=1e-9)


def test_fusion_targets():
    assert fidelity(fusion_postselect(ghz8_config())[0], ghz_state(8)) == pytest.approx(1, abs=1e-9)
    s, p = fusion_postselect(four_p_four_d_config())
    assert fidelity(s, four_p_four_d_state()) == pytest.approx(1, abs=1e-9)
    assert p == pytest.approx(0.5)


@pytest.mark.parametrize("eps", [0.1, 0.3, 0.7])
def test_distinguishability_matches_oracle(eps):
    rho, _ = fusion_postselect(ghz8_config(), eps)
    rho_o, _ = fusion_oracle(ghz8_config(), eps)
    assert np.allclose(rho, rho_o, atol=1e-9)
    assert fidelity(rho, ghz_state(8)) == pytest.approx(1 - eps / 2, abs=1e-9)


def test_bad_epsilon_rejected():
    with pytest.raises(ValueError):
        fusion_postselect(ghz8_config(), 1.5)


def test_config_validation():
    with pytest.raises(ValueError):
        ChipConfig({0: 0.0}, {0: 0.0}, bc_phases=[0.0])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_mesh_round_trip_haar(d):
    rng = np.random.default_rng(d)
    for u in unitary_group.rvs(d, size=100, random_state=rng):
        assert np.allclose(mesh_to_unitary(compile_measurement_mesh(u)), u, atol=1e-10)


def test_mesh_size_and_shifters():
    mesh = compile_measurement_mesh(unitary_group.rvs(4, random_state=0))
    assert len(mesh.mzis) == 6
    ph = mesh_shifter_phases(mesh)
    assert len(ph) == 12
    assert np.allclose(mesh_to_unitary(mesh_from_shifter_phases(mesh, ph)), mesh_to_unitary(mesh))


def test_mesh_rejects_non_unitary():
    with pytest.raises(ValueError):
        compile_measurement_mesh(np.ones((2, 2)))


def test_voltage_phase_inverse():
    cal = default_calibrations(1)[0]
    for phi in np.linspace(0, 2 * np.pi, 13)[:-1]:
        v = voltage_from_phase(cal, phi)
        assert 0 <= v <= cal.v_max
        assert (phase_from_voltage(cal, v) - phi) % (2 * np.pi) == pytest.approx(0, abs=1e-9) or \
            (phase_from_voltage(cal, v) - phi) % (2 * np.pi) == pytest.approx(2 * np.pi, abs=1e-9)


def test_voltage_out_of_range():
    cal = default_calibrations(1)[0]
    with pytest.raises(ValueError):
        phase_from_voltage(cal, -1.0)


def test_short_range_warns():
    cal = PhaseShifterCal(0.0, 1e-3, 0.0, 1.0, 0.0)
    with pytest.warns(RuntimeWarning):
        with pytest.raises(ValueError):
            voltage_from_phase(cal, 3.0)


def test_calibrator_recovers_parameters():
    cal = default_calibrations(3, seed=7)[2]
    v = np.linspace(0, cal.v_max, 200)
    fringe = synthetic_fringe(cal, v, visibility=0.95)
    fitted = fit_calibration((v, fringe), (v, cal.current(v)))
    assert fitted.omega == pytest.approx(cal.omega, rel=1e-6)
    assert (fitted.phi0 - cal.phi0) % (2 * np.pi) == pytest.approx(0, abs=1e-6) or \
        (fitted.phi0 - cal.phi0) % (2 * np.pi) == pytest.approx(2 * np.pi, abs=1e-6)
    est = PhaseShifterCalibrator().fit(v, fringe, iv=(v, cal.current(v)))
    assert est.visibility_ == pytest.approx(0.95, abs=1e-6)
    assert np.allclose(np.cos(est.predict(v)), np.cos(phase_from_voltage(cal, v)), atol=1e-6)


def test_calibrator_needs_data():
    with pytest.raises(ValueError):
        PhaseShifterCalibrator().fit(np.arange(3), np.arange(3), iv=(np.arange(3), np.ones(3)))


def test_noiseless_phases_unchanged():
    cals = default_calibrations(4)
    ph = np.array([0.1, 1.0, 2.0, 3.0])
    assert np.allclose(noisy_phases(ph, cals, 0.0, np.random.default_rng(0)), ph)


def test_noisy_trials_deterministic():
    cals = default_calibrations(4)
    ph = np.array([0.1, 1.0, 2.0, 3.0])
    f = lambda tp, nz: float(np.cos(tp - ph).mean())
    a = run_noisy_trials(f, NoiseConfig(0.05, 0.0, 50, 3), ph, cals)
    b = run_noisy_trials(f, NoiseConfig(0.05, 0.0, 50, 3), ph, cals)
    assert a["mean"] == b["mean"] and a["ci95"] > 0


def test_zero_noise_has_zero_ci():
    ph = np.array([0.5, 1.5])
    r = run_noisy_trials(lambda tp, nz: float(np.sum(tp)), NoiseConfig(0.0, 0.0, 20, 1), ph)
    assert r["ci95"] == 0 and r["mean"] == pytest.approx(2.0)


def test_noise_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(sigma_v=-0.1)
    with pytest.raises(ValueError):
        NoiseConfig(trials=0)
