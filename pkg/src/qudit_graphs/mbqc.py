"""Measurement-based computation on line, crazy and branched graphs.

Angle convention: measuring a qubit at angle theta means projecting onto
``(|0> + (-1)^s e^{-i theta} |1>) / sqrt2`` for outcome s.  On a line graph
this applies ``X^s H R(theta)`` to the state travelling along the line, with
``R(theta) = diag(1, e^{i theta})``.  Projecting the first vertex onto |psi>
encodes ``H |psi*>`` on the second.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from .core.states import (
    H, I2, X, Y, Z, apply_unitary, as_density,
    dephase, fidelity, measure_projective, partial_trace, rz,
)
from .graphs import branched, branched_layout, build_state, line

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}
PAULI_ORDER = "IXYZ"

INPUT_STATES = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / np.sqrt(2),
    "-i": np.array([1, -1j], dtype=complex) / np.sqrt(2),
}

GATES = {
    "I": I2,
    "X": X,
    "H": H,
    "RZ(pi/2)": rz(np.pi / 2),
    "RX(pi/2)": np.cos(np.pi / 4) * I2 - 1j * np.sin(np.pi / 4) * X,
    "RX(-pi/2)": np.cos(np.pi / 4) * I2 + 1j * np.sin(np.pi / 4) * X,
}

EULER_ANGLES = {
    "X": (np.pi, 0.0, 0.0),
    "H": (np.pi / 2, np.pi / 2, np.pi / 2),
    "RZ(pi/2)": (0.0, np.pi / 2, 0.0),
}

RX_ANGLES = {"I": 0.0, "X": np.pi, "RX(pi/2)": np.pi / 2, "RX(-pi/2)": -np.pi / 2}


def xy_basis(theta):
    """Columns are the outcome-0 and outcome-1 kets of an XY-plane measurement."""
    e = np.exp(-1j * theta)
    return np.array([[1, 1], [e, -e]], dtype=complex) / np.sqrt(2)


def basis_from_vector(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.column_stack([v, [-np.conj(v[1]), np.conj(v[0])]])


def euler_angles(gate):
    try:
        return EULER_ANGLES[gate]
    except KeyError:
        raise KeyError(f"no Euler angles for {gate!r}; pass angles directly") from None


def rx_angle(gate):
    try:
        return RX_ANGLES[gate]
    except KeyError:
        raise KeyError(f"no single-angle pattern for {gate!r}; pass the angle directly") from None


def line_gate(angles):
    """Single-qubit map implemented by input projection plus the given angles."""
    u = H
    for a in angles:
        u = H @ rz(a) @ u
    return u


# logical bases -----------------------------------------------------------------

_S = 1 / np.sqrt(2)
CODE_0 = np.array([1, 0, 0, 1]) * _S       # |00> + |11>
CODE_1 = np.array([0, 1, 1, 0]) * _S       # |01> + |10>
INVALID = (np.array([1, 0, 0, -1]) * _S, np.array([0, 1, -1, 0]) * _S)
ENCODER = np.column_stack([CODE_0, CODE_1]).astype(complex)


def logical_basis(kind, theta=None):
    """Four-column basis on a physical pair; columns 2 and 3 are invalid outcomes.

    ``Z_L``: {|00>+|11>, |01>+|10>}, ``X_L``: {|++>, |-->},
    ``Y_L``: (|00>+|11>) +- i (|01>+|10>), ``XY_L``: logical XY-plane angle.
    """
    if kind == "Z_L":
        a, b = CODE_0, CODE_1
    elif kind == "X_L":
        a, b = (CODE_0 + CODE_1) * _S, (CODE_0 - CODE_1) * _S
    elif kind == "Y_L":
        a, b = (CODE_0 + 1j * CODE_1) * _S, (CODE_0 - 1j * CODE_1) * _S
    elif kind == "XY_L":
        if theta is None:
            raise ValueError("XY_L needs an angle")
        a, b = ENCODER @ xy_basis(theta)[:, 0], ENCODER @ xy_basis(theta)[:, 1]
    elif kind == "PROJ_L":
        if theta is None:
            raise ValueError("PROJ_L needs a vector")
        v = basis_from_vector(theta)
        a, b = ENCODER @ v[:, 0], ENCODER @ v[:, 1]
    else:
        raise ValueError(f"unknown logical basis {kind!r}")
    return np.column_stack([a, b, *INVALID]).astype(complex)


INVALID_OUTCOMES = frozenset({2, 3})


def encode_logical(state):
    return ENCODER @ np.asarray(state, dtype=complex)


def decode_logical(state_pair):
    """Project a two-qubit vector or density operator onto the code space."""
    s = np.asarray(state_pair, dtype=complex)
    if s.ndim == 1:
        return ENCODER.conj().T @ s
    return ENCODER.conj().T @ s @ ENCODER


# patterns -------------------------------------------------------------------------

@dataclass
class MeasurementPattern:
    """Per-vertex instructions, in execution order.

    Each instruction is ``(vertices, kind, param)``: ``kind`` is ``"xy"``
    (angle), ``"z"``, ``"proj"`` (single-qubit vector, forced), or a logical
    kind on a vertex pair (``"X_L"``, ``"Y_L"``, ``"Z_L"``, ``"XY_L"``,
    ``"PROJ_L"``).  ``outputs`` are the vertices left unmeasured.
    """

    n: int
    instructions: list
    outputs: list
    policy: str = "post-select-zero"
    logical_output: bool = False

    def __post_init__(self):
        if self.policy not in ("post-select-zero", "track-and-correct"):
            raise ValueError(f"unknown byproduct policy {self.policy!r}")
        seen = set(self.outputs)
        for verts, kind, _ in self.instructions:
            verts = tuple(verts)
            if set(verts) & seen:
                raise ValueError(f"vertex {verts} has more than one instruction")
            seen |= set(verts)
            logical = kind.endswith("_L")
            if logical != (len(verts) == 2):
                raise ValueError(f"instruction {kind} on {verts} has the wrong group size")
        if seen != set(range(self.n)):
            raise ValueError("every vertex needs exactly one instruction or must be an output")

    def to_json(self):
        def enc(p):
            if p is None or isinstance(p, (int, float)):
                return p
            return [[float(np.real(c)), float(np.imag(c))] for c in np.asarray(p).ravel()]
        return json.dumps({
            "n": self.n, "outputs": self.outputs, "policy": self.policy,
            "instructions": [[list(v), k, enc(p)] for v, k, p in self.instructions],
        })


def _instruction_basis(kind, param):
    if kind == "xy":
        return xy_basis(param)
    if kind == "z":
        return np.eye(2, dtype=complex)
    if kind == "proj":
        return basis_from_vector(param)
    return logical_basis(kind, param)


def run_pattern(state, pattern: MeasurementPattern, rng=None):
    """Execute a pattern.

    Returns ``(output, outcomes, discarded)``.  Under post-select-zero every
    outcome is forced to 0.  Under track-and-correct XY outcomes are sampled
    and a line-graph Pauli frame is carried forward (angles adapted,
    final X/Z correction applied); projections stay forced.  A forced
    outcome with no weight raises PostSelectionError; a sampled logical
    outcome outside the code space sets ``discarded``.
    """
    rng = np.random.default_rng(rng)
    current = np.asarray(state, dtype=complex)
    alive = list(range(pattern.n))
    outcomes = {}
    fx = fz = 0
    track = pattern.policy == "track-and-correct"
    for verts, kind, param in pattern.instructions:
        verts = tuple(verts)
        pos = [alive.index(v) for v in verts]
        if track and kind in ("xy", "XY_L"):
            param = (-1) ** fx * param
        basis = _instruction_basis(kind, param)
        forced = not track or kind in ("proj", "PROJ_L", "z")
        if forced:
            _, _, current = measure_projective(current, basis, pos, outcome=0)
            s = 0
        else:
            s, _, current = measure_projective(current, basis, pos, rng=rng)
            if s in INVALID_OUTCOMES and kind.endswith("_L"):
                return None, outcomes, True
        outcomes[verts] = s
        alive = [v for v in alive if v not in verts]
        if track and kind in ("xy", "XY_L"):
            fx, fz = s ^ fz, fx
    if track and (fx or fz):
        corr = np.linalg.matrix_power(Z, fz) @ np.linalg.matrix_power(X, fx)
        if pattern.logical_output:
            corr = ENCODER @ corr @ ENCODER.conj().T + np.outer(INVALID[0], INVALID[0]) + np.outer(INVALID[1], INVALID[1])
            current = apply_unitary(current, corr, [0, 1])
        else:
            current = apply_unitary(current, corr, [len(alive) - 1])
    if pattern.logical_output:
        current = decode_logical(current)
    return current, outcomes, False


def line_pattern(n, psi_in, angles, policy="post-select-zero"):
    """Input projection on vertex 0, XY angles on 1..n-2, output on n-1."""
    if len(angles) != n - 2:
        raise ValueError(f"a {n}-vertex line takes {n - 2} angles")
    instr = [((0,), "proj", np.conj(psi_in))]
    instr += [((k + 1,), "xy", a) for k, a in enumerate(angles)]
    return MeasurementPattern(n, instr, [n - 1], policy)


def crazy_pattern(psi_in, angles, policy="post-select-zero"):
    """Logical line of three columns (0,1), (2,3), (4,5) with one angle."""
    if len(angles) != 1:
        raise ValueError("the crazy graph takes a single angle")
    instr = [((0, 1), "PROJ_L", np.conj(psi_in)), ((2, 3), "XY_L", angles[0])]
    return MeasurementPattern(6, instr, [4, 5], policy, logical_output=True)


def encode_input_by_measurement(line_state, psi):
    """Project vertex 0 of a line onto |psi>.

    Returns ``(basis, encoded)`` where ``encoded`` is the single-qubit state
    H |psi*> now carried by vertex 1, plus the full post-state as a third item.
    """
    basis = basis_from_vector(psi)
    _, _, post = measure_projective(line_state, basis, [0], outcome=0)
    encoded = H @ np.conj(np.asarray(psi, dtype=complex))
    return basis, encoded / np.linalg.norm(encoded), post


def run_gate(gate_angles, psi_in, encoding="physical", policy="post-select-zero", rng=None):
    """Run the line (physical) or crazy (logical) pattern and return the output."""
    if encoding == "physical":
        n = len(gate_angles) + 2
        pat = line_pattern(n, psi_in, gate_angles, policy)
        out, _, disc = run_pattern(build_state(line(n)), pat, rng)
    elif encoding == "logical":
        from .graphs import crazy6
        pat = crazy_pattern(psi_in, gate_angles, policy)
        out, _, disc = run_pattern(build_state(crazy6()), pat, rng)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    if disc:
        return None
    return _normalize(out)


def _normalize(s):
    s = np.asarray(s, dtype=complex)
    if s.ndim == 1:
        return s / np.linalg.norm(s)
    return s / np.trace(s)


# process tomography ---------------------------------------------------------------

TOMO_INPUTS = ("0", "1", "+", "+i")


def _choi_from_runner(runner):
    out = {k: as_density(runner(INPUT_STATES[k])) for k in TOMO_INPUTS}
    e00, e11 = out["0"], out["1"]
    e01 = out["+"] + 1j * out["+i"] - (1 + 1j) / 2 * (e00 + e11)
    e10 = out["+"] - 1j * out["+i"] - (1 - 1j) / 2 * (e00 + e11)
    blocks = {(0, 0): e00, (0, 1): e01, (1, 0): e10, (1, 1): e11}
    j = np.zeros((4, 4), dtype=complex)
    for (a, b), e in blocks.items():
        j += np.kron(np.outer(np.eye(2)[a], np.eye(2)[b]), e)
    return j


def _pauli_vecs():
    vecs = []
    for p in PAULI_ORDER:
        v = np.zeros(4, dtype=complex)
        for i in range(2):
            v += np.kron(np.eye(2)[i], PAULIS[p] @ np.eye(2)[i])
        vecs.append(v)
    return np.column_stack(vecs)


def chi_from_choi(j):
    v = _pauli_vecs()
    chi = v.conj().T @ j @ v / 4
    chi = (chi + chi.conj().T) / 2
    return chi / np.trace(chi).real


def ideal_chi(u):
    coeffs = np.array([np.trace(PAULIS[p].conj().T @ u) / 2 for p in PAULI_ORDER])
    coeffs = coeffs / np.linalg.norm(coeffs)
    return np.outer(coeffs, coeffs.conj())


def process_tomography(runner, ideal=None, clamp=-1e-6):
    """Linear-inversion chi matrix (Pauli basis I, X, Y, Z) and chi-overlap fidelity.

    ``runner`` maps an input vector to the output state.  ``ideal`` is a
    gate name from GATES or a 2x2 unitary.
    """
    chi = chi_from_choi(_choi_from_runner(runner))
    w, v = np.linalg.eigh(chi)
    if w.min() < clamp:
        warnings.warn(f"unphysical chi (min eigenvalue {w.min():.3g}); clamping", RuntimeWarning)
        w = np.clip(w, 0, None)
        chi = (v * w) @ v.conj().T
        chi = chi / np.trace(chi).real
    fid = None
    if ideal is not None:
        u = GATES[ideal] if isinstance(ideal, str) else np.asarray(ideal)
        fid = float(np.real(np.trace(ideal_chi(u) @ chi)))
    return chi, fid


# branched-code teleportation ----------------------------------------------------

def majority_success(m, p, tie="half"):
    """P(majority of m independent bits is correct) with flip probability p."""
    if m == 0:
        return 0.5
    total = 0.0
    for k in range(m + 1):
        w = comb(m, k) * p**k * (1 - p) ** (m - k)
        if 2 * k < m:
            total += w
        elif 2 * k == m:
            total += 0.5 * w if tie == "half" else 0.0
    return total


def error_qubit_count(code, mode):
    m = code - 2
    counts = {"one": 1, "two": 2, "all": m}
    if mode not in counts:
        raise ValueError(f"unknown error mode {mode!r}")
    return min(counts[mode], m)


def teleport_analytic(code, mode, p, tie="half"):
    """Closed form: majority over the middle qubits, errors on ``mode`` of them."""
    m = code - 2
    e = error_qubit_count(code, mode)
    total = 0.0
    for k in range(e + 1):
        w = comb(e, k) * p**k * (1 - p) ** (e - k)
        if 2 * k < m:
            total += w
        elif 2 * k == m:
            total += 0.5 * w if tie == "half" else 0.0
    return total


TARGETS = {"+i": INPUT_STATES["+i"], "-i": INPUT_STATES["-i"]}


def _branched_state(code):
    return build_state(branched(code))


def _teleport_dm(rho, outer_in, outer_out, middle, target, tie):
    """Project the input vertex, measure middle qubits in X, majority-correct."""
    _, _, rho = measure_projective(rho, basis_from_vector(np.conj(target)), [outer_in], outcome=0)
    shift = lambda q: q - (q > outer_in)
    middle = [shift(q) for q in middle]
    out = shift(outer_out)
    m = len(middle)
    xb = H
    # rotate middle qubits into the Z basis and read every outcome pattern
    for q in middle:
        rho = apply_unitary(rho, xb, [q])
    keep = sorted(middle + [out])
    red = partial_trace(rho, keep)
    pos_out = keep.index(out)
    pos_mid = [keep.index(q) for q in middle]
    nk = len(keep)
    fid = 0.0
    for bits in product((0, 1), repeat=m):
        proj_idx = []
        for o in (0, 1):
            full = [0] * nk
            for q, b in zip(pos_mid, bits):
                full[q] = b
            full[pos_out] = o
            proj_idx.append(int("".join(map(str, full)), 2))
        block = red[np.ix_(proj_idx, proj_idx)]
        ones = sum(bits)
        if 2 * ones > m:
            outcomes = [1]
        elif 2 * ones < m:
            outcomes = [0]
        else:
            outcomes = [0, 1] if tie == "half" else [None]
        for s in outcomes:
            if s is None:
                continue
            c = np.linalg.matrix_power(X, s)
            w = 0.5 if len(outcomes) == 2 else 1.0
            fid += w * float(np.real(target.conj() @ c @ block @ c.conj().T @ target))
    return fid


def _code_layout(code):
    outer, middle = branched_layout(code)
    return outer[0], outer[1], middle


def teleport_branched(code, mode, p, target="+i", method="analytic", shots=2000, seed=None,
                      tie="half", lost=()):
    """Teleport ``target`` across B_code with Z errors on some middle qubits.

    ``method``: ``"analytic"`` (binomial majority), ``"density"`` (exact
    density-matrix simulation with a dephasing channel), ``"detuned"``
    (measurement bases of the error qubits rotated by delta with
    sin^2(delta/2) = p) or ``"sampled"`` (Monte Carlo).  ``lost`` lists
    middle positions traced out before decoding.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if code not in (3, 5, 7):
        raise ValueError("branched codes are B3, B5 and B7")
    a, b, middle = _code_layout(code)
    if set(lost) & {a, b}:
        raise ValueError("losing an outer qubit is not supported: it carries the logical input or output")
    survivors = [q for q in middle if q not in lost]
    e = error_qubit_count(code, mode)
    err_qubits = middle[:e]
    tgt = TARGETS[target] if isinstance(target, str) else np.asarray(target, dtype=complex)
    if method == "analytic":
        k_err = len([q for q in err_qubits if q in survivors])
        m = len(survivors)
        total = 0.0
        for k in range(k_err + 1):
            w = comb(k_err, k) * p**k * (1 - p) ** (k_err - k)
            if 2 * k < m:
                total += w
            elif 2 * k == m:
                total += 0.5 * w if tie == "half" else 0.0
        return total
    rho = as_density(_branched_state(code))
    if method == "density":
        for q in err_qubits:
            rho = dephase(rho, q, p)
        keep = [q for q in range(code) if q not in lost]
        rho = partial_trace(rho, keep)
        idx = {q: i for i, q in enumerate(keep)}
        return _teleport_dm(rho, idx[a], idx[b], [idx[q] for q in survivors], tgt, tie)
    if method == "detuned":
        delta = 2 * np.arcsin(np.sqrt(p))
        for q in err_qubits:
            rho = apply_unitary(rho, rz(delta), [q])
        keep = [q for q in range(code) if q not in lost]
        rho = partial_trace(rho, keep)
        idx = {q: i for i, q in enumerate(keep)}
        return _teleport_dm(rho, idx[a], idx[b], [idx[q] for q in survivors], tgt, tie)
    if method == "sampled":
        rng = np.random.default_rng(seed)
        flips = rng.random((shots, len(err_qubits))) < p
        err_surv = np.array([q in survivors for q in err_qubits], dtype=bool)
        k = (flips & err_surv).sum(axis=1)
        m = len(survivors)
        ok = (2 * k < m).astype(float)
        if tie == "half":
            ties = 2 * k == m
            ok[ties] = rng.random(ties.sum()) < 0.5
        return float(ok.mean())
    raise ValueError(f"unknown method {method!r}")


LOSS_SURVIVORS = {"A": [0, 1], "C": [4, 5], "D": [6]}


def loss_teleport(lost_photon, p=0.0, mode="all", method="density", target="-i", tie="half"):
    """B7 teleportation with one photon's qubits traced out.

    B7 vertices follow chip labels 1..7; photon A carries 1, 2, C carries
    5, 6 and D carries 7 (its partner 8 was removed when B7 was made).
    Photon B holds both outer vertices and cannot be lost.
    """
    if lost_photon == "B":
        raise ValueError("photon B carries the outer (unprotected) qubits; its loss is unsupported")
    if lost_photon not in LOSS_SURVIVORS:
        raise ValueError(f"unknown photon {lost_photon!r}")
    return teleport_branched(7, mode, p, target=target, method=method, lost=LOSS_SURVIVORS[lost_photon],
                             tie=tie)


def loss_formula(lost_photon, p, tie="half"):
    """Majority success over the surviving middle qubits."""
    m = 5 - len(LOSS_SURVIVORS[lost_photon])
    return majority_success(m, p, tie)


def teleport_sweep(ps, codes=(3, 5, 7), modes=("one", "two", "all"), method="analytic", **kw):
    """Rows (code, mode, p, F, stderr); stderr is zero for exact methods."""
    rows = []
    for code in codes:
        for mode in modes:
            for p in ps:
                f = teleport_branched(code, mode, p, method=method, **kw)
                se = 0.0
                if method == "sampled":
                    se = float(np.sqrt(max(f * (1 - f), 0) / kw.get("shots", 2000)))
                rows.append((f"B{code}", mode, float(p), float(f), se))
    return rows
