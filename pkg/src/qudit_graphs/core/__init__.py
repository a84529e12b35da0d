"""State-vector engine, Pauli algebra and the Fock-space oracle."""
from .fock import fock_amplitude, permanent, run_postselected
from .pauli import PauliString, PauliSum, pauli_expectation
from .states import (
    CX, CZ, H, I2, SWAP, X, Y, Z, PostSelectionError, apply_channel, apply_unitary,
    as_density, branch_states, dephase, fidelity, ghz_state, ket, measure_projective,
    num_qubits, partial_trace, permute_qubits, plus_state, project, purity, rx, rz, tensor,
)
