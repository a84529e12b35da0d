"""Dense state-vector and density-matrix operations.

Qubit ordering is big-endian everywhere: qubit 0 is the leftmost tensor
factor, so basis index ``b`` has qubit ``q`` equal to ``(b >> (n - 1 - q)) & 1``.
Pure states are 1-D complex arrays of length ``2**n``; mixed states are
``2**n x 2**n`` arrays.  Functions accept either where it makes sense.
"""
from __future__ import annotations

import numpy as np

MAX_QUBITS = 12
TOL = 1e-10

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
I2 = np.eye(2, dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


class PostSelectionError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


def rz(theta):
    """Phase gate diag(1, e^{i theta})."""
    return np.diag([1, np.exp(1j * theta)]).astype(complex)


def rx(theta):
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * X


def ket(bits):
    """Computational basis state from a bit string such as ``"0110"``."""
    n = len(bits)
    v = np.zeros(2**n, dtype=complex)
    v[int(bits, 2)] = 1
    return v


def plus_state(n):
    return np.full(2**n, 2 ** (-n / 2), dtype=complex)


def ghz_state(n):
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


def num_qubits(state) -> int:
    dim = state.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the maximum of {MAX_QUBITS}")
    if state.ndim == 2 and state.shape != (dim, dim):
        raise ValueError("density operator must be square")
    return n


def is_density(state) -> bool:
    return np.ndim(state) == 2


def as_density(state):
    state = np.asarray(state, dtype=complex)
    if is_density(state):
        return state
    return np.outer(state, state.conj())


def tensor(*factors):
    out = np.array([1], dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def _check_unitary(gate):
    gate = np.asarray(gate, dtype=complex)
    d = gate.shape[0]
    if gate.shape != (d, d) or not np.allclose(gate.conj().T @ gate, np.eye(d), atol=TOL):
        raise ValueError("gate is not unitary")
    return gate


def _apply_left(tensor_state, gate, targets, n, offset=0):
    """Contract ``gate`` into axes ``targets`` (shifted by offset) of an n-qubit tensor."""
    k = len(targets)
    g = gate.reshape((2,) * (2 * k))
    axes = [offset + t for t in targets]
    out = np.tensordot(g, tensor_state, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_unitary(state, gate, targets):
    """Apply a unitary on ``targets`` to a state vector or density operator."""
    state = np.asarray(state, dtype=complex)
    n = num_qubits(state)
    targets = [int(t) for t in np.atleast_1d(targets)]
    gate = _check_unitary(gate)
    if gate.shape[0] != 2 ** len(targets):
        raise ValueError("gate size does not match number of targets")
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise ValueError(f"invalid targets {targets} for {n} qubits")
    if not is_density(state):
        t = _apply_left(state.reshape((2,) * n), gate, targets, n)
        return t.reshape(-1)
    t = state.reshape((2,) * (2 * n))
    t = _apply_left(t, gate, targets, n)
    t = _apply_left(t, gate.conj(), targets, n, offset=n)
    return t.reshape(2**n, 2**n)


def apply_channel(rho, kraus, targets):
    """Apply a channel given by Kraus operators on ``targets``."""
    rho = as_density(rho)
    n = num_qubits(rho)
    out = np.zeros_like(rho)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        t = rho.reshape((2,) * (2 * n))
        t = _apply_left(t, k, targets, n)
        t = _apply_left(t, k.conj(), targets, n, offset=n)
        out += t.reshape(rho.shape)
    return out


def dephase(rho, qubit, p):
    """Z error with probability p on one qubit."""
    return apply_channel(rho, [np.sqrt(1 - p) * I2, np.sqrt(p) * Z], [qubit])


def _basis_matrix(basis, k):
    b = np.asarray(basis, dtype=complex)
    d = 2**k
    if b.shape != (d, d):
        raise ValueError(f"basis for {k} qubits must be {d}x{d} (columns are basis vectors)")
    if not np.allclose(b.conj().T @ b, np.eye(d), atol=1e-9):
        raise ValueError("measurement basis is not orthonormal")
    return b


def branch_states(state, basis, qubits):
    """Unnormalised post-measurement states for every basis outcome.

    Returns an array indexed by outcome whose entries are states over the
    unmeasured qubits (in their original order), together with probabilities.
    """
    state = np.asarray(state, dtype=complex)
    n = num_qubits(state)
    qubits = [int(q) for q in np.atleast_1d(qubits)]
    k = len(qubits)
    b = _basis_matrix(basis, k)
    rest = [q for q in range(n) if q not in qubits]
    d, r = 2**k, 2 ** len(rest)
    bd = b.conj().T
    if not is_density(state):
        t = np.transpose(state.reshape((2,) * n), qubits + rest).reshape(d, r)
        branches = bd @ t
        probs = np.sum(np.abs(branches) ** 2, axis=1)
        return branches, probs
    perm = qubits + rest
    t = np.transpose(state.reshape((2,) * (2 * n)), perm + [n + q for q in perm])
    t = t.reshape(d, r, d, r)
    branches = np.einsum("ao,aibj,bo->oij", b.conj(), t, b, optimize=True)
    probs = np.real(np.einsum("aii->a", branches))
    return branches, probs


def measure_projective(state, basis, qubits, outcome=None, rng=None):
    """Measure ``qubits`` in an orthonormal basis (columns of ``basis``).

    With ``outcome`` given the result is forced (post-selection); otherwise
    it is sampled with ``rng``.  Returns ``(outcome, probability, post_state)``
    where the post-state lives on the unmeasured qubits and is renormalised.
    """
    branches, probs = branch_states(state, basis, qubits)
    if outcome is None:
        rng = np.random.default_rng(rng)
        p = np.clip(probs, 0, None)
        outcome = int(rng.choice(len(p), p=p / p.sum()))
    prob = float(probs[outcome])
    if prob < 1e-12:
        raise PostSelectionError(f"outcome {outcome} has probability {prob:.3g}")
    post = branches[outcome]
    post = post / (prob if post.ndim == 2 else np.sqrt(prob))
    return outcome, prob, post


def project(state, vector, qubit):
    """Forced single-qubit projection onto ``vector``; returns (prob, post-state)."""
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    basis = np.column_stack([v, [-v[1].conj(), v[0].conj()]])
    _, prob, post = measure_projective(state, basis, [qubit], outcome=0)
    return prob, post


def partial_trace(state, keep):
    """Reduced density operator on the ``keep`` qubits (kept in ascending order)."""
    rho = as_density(state)
    n = num_qubits(rho)
    keep = sorted(int(q) for q in keep)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if any(q < 0 or q >= n for q in keep):
        raise ValueError("keep qubits out of range")
    if len(keep) == n:
        return rho
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    t = np.transpose(t, keep + drop + [n + q for q in keep] + [n + q for q in drop])
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def permute_qubits(state, order):
    """Reorder qubits so that new qubit i is old qubit ``order[i]``."""
    state = np.asarray(state, dtype=complex)
    n = num_qubits(state)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation")
    if not is_density(state):
        return np.transpose(state.reshape((2,) * n), order).reshape(-1)
    t = np.transpose(state.reshape((2,) * (2 * n)), order + [n + q for q in order])
    return t.reshape(2**n, 2**n)


def fidelity(a, b) -> float:
    """Fidelity of ``a`` (vector or density operator) with the pure state ``b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if is_density(b):
        if is_density(a):
            raise ValueError("at least one argument must be a pure state")
        a, b = b, a
    if a.shape[0] != b.shape[0]:
        raise ValueError("dimension mismatch")
    if is_density(a):
        return float(np.real(b.conj() @ a @ b))
    return float(np.abs(np.vdot(b, a)) ** 2)


def purity(rho) -> float:
    rho = as_density(rho)
    return float(np.real(np.trace(rho @ rho)))


def normalize(state):
    state = np.asarray(state, dtype=complex)
    if is_density(state):
        return state / np.trace(state)
    return state / np.linalg.norm(state)
