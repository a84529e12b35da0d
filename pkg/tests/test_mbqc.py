from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qudit_graphs.core.states import as_density, fidelity
from qudit_graphs.graphs import build_state, crazy6, line
from qudit_graphs.mbqc import (
    EULER_ANGLES, GATES, INPUT_STATES, RX_ANGLES, MeasurementPattern, encode_input_by_measurement,
    euler_angles, line_gate, logical_basis, loss_formula, loss_teleport, majority_success,
    process_tomography, run_gate, run_pattern, rx_angle, teleport_branched, teleport_sweep,
)

PS = [round(0.05 * k, 2) for k in range(21)]


def f_b3(p):
    return 1 - p


def f_b5(p):
    return (1 - p) ** 3 + 3 * p * (1 - p) ** 2


def f_b7(p):
    return sum(comb(5, k) * p**k * (1 - p) ** (5 - k) for k in range(3))


# tables ------------------------------------------------------------------------

def test_euler_table():
    assert euler_angles("X") == (np.pi, 0, 0)
    assert euler_angles("H") == (np.pi / 2, np.pi / 2, np.pi / 2)
    with pytest.raises(KeyError):
        euler_angles("T")


def test_rx_table():
    assert rx_angle("RX(pi/2)") == np.pi / 2 and rx_angle("I") == 0
    with pytest.raises(KeyError):
        rx_angle("H")


@pytest.mark.parametrize("gate", sorted(EULER_ANGLES))
def test_line_gate_matches_target_up_to_phase(gate):
    u, v = line_gate(euler_angles(gate)), GATES[gate]
    assert abs(np.trace(u.conj().T @ v)) / 2 == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("policy", ["post-select-zero", "track-and-correct"])
@pytest.mark.parametrize("gate", sorted(EULER_ANGLES))
def test_l5_euler_patterns(gate, policy):
    rng = np.random.default_rng(0)
    _, f = process_tomography(lambda psi: run_gate(euler_angles(gate), psi, "physical", policy, rng), gate)
    assert f == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("policy", ["post-select-zero", "track-and-correct"])
@pytest.mark.parametrize("encoding", ["physical", "logical"])
@pytest.mark.parametrize("gate", sorted(RX_ANGLES))
def test_rx_patterns(gate, encoding, policy):
    rng = np.random.default_rng(1)
    _, f = process_tomography(lambda psi: run_gate([rx_angle(gate)], psi, encoding, policy, rng), gate)
    assert f == pytest.approx(1, abs=1e-9)


def test_track_and_correct_every_outcome():
    psi = INPUT_STATES["+i"]
    for seed in range(20):
        out = run_gate(euler_angles("H"), psi, "physical", "track-and-correct", seed)
        assert fidelity(out, GATES["H"] @ psi) == pytest.approx(1, abs=1e-9)


def test_h_on_zero_gives_plus():
    out = run_gate(euler_angles("H"), INPUT_STATES["0"])
    assert fidelity(out, INPUT_STATES["+"]) == pytest.approx(1, abs=1e-9)


@given(st.complex_numbers(max_magnitude=1), st.complex_numbers(max_magnitude=1))
def test_logical_equals_physical(a, b):
    v = np.array([a, b], dtype=complex)
    if np.linalg.norm(v) < 1e-3:
        v = np.array([1, 0], dtype=complex)
    v = v / np.linalg.norm(v)
    for angle in RX_ANGLES.values():
        assert fidelity(run_gate([angle], v, "logical"), run_gate([angle], v, "physical")) == \
            pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("proj,encoded", [("+", "0"), ("0", "+"), ("+i", "+i"), ("1", "-"), ("-", "1")])
def test_input_encoding_map(proj, encoded):
    _, enc, post = encode_input_by_measurement(build_state(line(2)), INPUT_STATES[proj])
    assert fidelity(enc, INPUT_STATES[encoded]) == pytest.approx(1, abs=1e-12)
    assert fidelity(post, INPUT_STATES[encoded]) == pytest.approx(1, abs=1e-12)


# logical bases -----------------------------------------------------------------

@pytest.mark.parametrize("kind,arg", [("Z_L", None), ("X_L", None), ("Y_L", None), ("XY_L", 0.7),
                                      ("PROJ_L", INPUT_STATES["+i"])])
def test_logical_bases_orthonormal(kind, arg):
    b = logical_basis(kind, arg)
    assert np.allclose(b.conj().T @ b, np.eye(4))


def test_invalid_logical_outcome_is_flagged():
    pm = np.kron([1, 1], [1, -1]) / 2
    probs = np.abs(logical_basis("X_L").conj().T @ pm) ** 2
    assert probs[:2].sum() == pytest.approx(0) and probs[2:].sum() == pytest.approx(1)
    psi_plus = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert (np.abs(logical_basis("Z_L").conj().T @ psi_plus) ** 2)[0] == pytest.approx(1)


def test_pattern_validation():
    with pytest.raises(ValueError):
        MeasurementPattern(3, [((0,), "xy", 0.0)], [2])
    with pytest.raises(ValueError):
        MeasurementPattern(2, [((0,), "X_L", None)], [1])
    with pytest.raises(ValueError):
        MeasurementPattern(2, [((0,), "xy", 0.0)], [1], policy="guess")


def test_pattern_json():
    pat = MeasurementPattern(3, [((0,), "proj", INPUT_STATES["0"]), ((1,), "xy", 0.5)], [2])
    assert '"policy": "post-select-zero"' in pat.to_json()


# process tomography ------------------------------------------------------------

def test_identity_and_h_chi():
    chi, f = process_tomography(lambda psi: psi, "I")
    assert chi[0, 0] == pytest.approx(1) and f == pytest.approx(1)
    chi, _ = process_tomography(lambda psi: GATES["H"] @ psi)
    # H = (X + Z)/sqrt2: unit weight split on the X, Z block
    assert chi[1, 1] + chi[3, 3] == pytest.approx(1)


def test_full_dephasing_chi():
    def dephase(psi):
        rho = as_density(psi)
        return np.diag(np.diag(rho))
    chi, _ = process_tomography(dephase)
    assert np.allclose(chi, np.diag([0.5, 0, 0, 0.5]), atol=1e-12)


# teleportation -----------------------------------------------------------------

@pytest.mark.parametrize("code,curve", [(3, f_b3), (5, f_b5), (7, f_b7)])
def test_analytic_curves_match_density(code, curve):
    for p in PS:
        a = teleport_branched(code, "all", p)
        d = teleport_branched(code, "all", p, method="density")
        assert a == pytest.approx(curve(p), abs=1e-12)
        assert d == pytest.approx(a, abs=1e-9)


@pytest.mark.parametrize("mode", ["one", "two"])
@pytest.mark.parametrize("code", [3, 5, 7])
def test_partial_error_modes_match_density(code, mode):
    for p in (0.0, 0.2, 0.5, 0.9):
        assert teleport_branched(code, mode, p, method="density") == pytest.approx(
            teleport_branched(code, mode, p), abs=1e-9)


def test_b5_single_error_always_corrected():
    assert all(teleport_branched(5, "one", p) == pytest.approx(1) for p in PS)


def test_detuned_equals_stochastic():
    for p in (0.1, 0.3, 0.7):
        assert teleport_branched(7, "all", p, method="detuned") == pytest.approx(
            teleport_branched(7, "all", p, method="density"), abs=1e-9)


def test_gap_at_0_2():
    gap = teleport_branched(7, "all", 0.2) - teleport_branched(3, "all", 0.2)
    assert gap == pytest.approx(0.14208, abs=1e-5)


def test_threshold_and_ordering():
    for code in (3, 5, 7):
        assert teleport_branched(code, "all", 0.5) == pytest.approx(0.5)
    for p in PS:
        f3, f5, f7 = (teleport_branched(c, "all", p) for c in (3, 5, 7))
        if p < 0.5:
            assert f7 >= f5 >= f3
        elif p > 0.5:
            assert f7 <= f5 <= f3


def test_sampled_converges():
    exact = teleport_branched(7, "all", 0.3)
    errs = [abs(teleport_branched(7, "all", 0.3, method="sampled", shots=s, seed=1) - exact)
            for s in (100_000,)]
    assert errs[0] < 5 * np.sqrt(exact * (1 - exact) / 100_000)
    assert teleport_branched(7, "all", 0.3, method="sampled", seed=4) == \
        teleport_branched(7, "all", 0.3, method="sampled", seed=4)


def test_bad_p_rejected():
    with pytest.raises(ValueError):
        teleport_branched(3, "all", 1.2)


def test_sweep_rows():
    rows = teleport_sweep([0.0, 0.5])
    assert len(rows) == 3 * 3 * 2 and rows[0] == ("B3", "one", 0.0, 1.0, 0.0)


# loss ----------------------------------------------------------------------------

@pytest.mark.parametrize("photon", ["A", "C", "D"])
def test_loss_at_zero_noise(photon):
    assert loss_teleport(photon) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("photon", ["A", "C", "D"])
def test_loss_matches_majority_formula(photon):
    for p in (0.1, 0.2, 0.35, 0.5, 0.8):
        assert loss_teleport(photon, p) == pytest.approx(loss_formula(photon, p), abs=1e-9)


def test_loss_three_survivors_value():
    assert loss_formula("A", 0.2) == pytest.approx(0.896)
    assert majority_success(3, 0.5) == pytest.approx(0.5)


def test_outer_photon_loss_unsupported():
    with pytest.raises(ValueError):
        loss_teleport("B")
