"""Fidelity estimation: stabilizer averaging, setting compilation,
theta-measurements for GHZ states, the off-diagonal method for sparse
qudit targets, and counts simulation with bootstrap error bars.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .core.pauli import PauliString, pauli_expectation
from .core.states import CX, H, apply_unitary, as_density, num_qubits, rz

BELL_LETTERS = {"II", "XX", "YY", "ZZ"}


@dataclass(frozen=True)
class MeasurementSetting:
    """Local Pauli axis per qubit, plus optional Bell-basis pairs.

    An ``I`` axis marks a qubit whose readout is ignored (read in Z).
    A pair listed in ``entangled`` must sit inside one qudit (positions
    ``2j, 2j + 1``) and is measured in the Bell basis, which gives access to
    II, XX, YY and ZZ on that pair; the axis letters there are ignored.
    """

    axes: str
    entangled: tuple = ()

    def __post_init__(self):
        if set(self.axes) - set("IXYZ"):
            raise ValueError(f"setting axes must be I, X, Y or Z, got {self.axes!r}")
        seen = set()
        for a, b in self.entangled:
            if b != a + 1 or a % 2:
                raise ValueError(f"entangled pair {(a, b)} is not inside one qudit")
            if {a, b} & seen:
                raise ValueError("entangled pairs overlap")
            seen |= {a, b}

    @property
    def n(self):
        return len(self.axes)

    def derives(self, stabilizer):
        """True if the signed Pauli string can be read off this setting."""
        letters = PauliString.parse(stabilizer).letters
        if len(letters) != self.n:
            raise ValueError("length mismatch")
        paired = {q for pr in self.entangled for q in pr}
        for a, b in self.entangled:
            if letters[a] + letters[b] not in BELL_LETTERS:
                return False
        return all(c == "I" or c == s for q, (c, s) in enumerate(zip(letters, self.axes))
                   if q not in paired)

    def __str__(self):
        if not self.entangled:
            return self.axes
        return self.axes + "[" + ",".join(f"{a}{b}" for a, b in self.entangled) + "]"


def compile_settings(stabilizers):
    """Greedy set cover of ``stabilizers`` by full-weight local settings.

    Returns a list of ``(MeasurementSetting, [derived stabilizers])``.  Ties
    are broken lexicographically on the setting string.
    """
    strs = [PauliString.parse(s) for s in stabilizers]
    if not strs:
        return []
    n = strs[0].n
    if any(s.n != n for s in strs):
        raise ValueError("all stabilizers must have the same length")
    remaining = list(dict.fromkeys(str(s) for s in strs))
    letters = {s: PauliString.parse(s).letters for s in remaining}
    candidates = ["".join(c) for c in product("XYZ", repeat=n)]
    plan = []
    while remaining:
        best, best_cov = None, []
        for cand in candidates:
            cov = [s for s in remaining
                   if all(c == "I" or c == a for c, a in zip(letters[s], cand))]
            if len(cov) > len(best_cov):
                best, best_cov = cand, cov
        plan.append((MeasurementSetting(best), best_cov))
        remaining = [s for s in remaining if s not in best_cov]
    return plan


def plan_from_table(table, n=None):
    """Turn a ``{setting: [derived]}`` fixture into (setting, derived) pairs."""
    out = []
    items = table.items() if isinstance(table, dict) else [(s, d) for s, _, d in table]
    pairs = {} if isinstance(table, dict) else {s: e for s, e, _ in table}
    for setting, derived in items:
        out.append((MeasurementSetting(setting, tuple(pairs.get(setting, ()))), list(derived)))
    return out


def stabilizer_fidelity(expectations, n, generators=None):
    """Full-group and generator-mean fidelity estimates.

    ``expectations`` maps signed stabilizer strings to measured values.
    The full-group estimate needs all ``2**n`` group elements and is None
    otherwise; the generator mean needs ``generators`` and is None if they
    are not given.
    """
    signed = {}
    for k, v in expectations.items():
        P = PauliString.parse(k)
        signed[P.letters] = (P.phase.real, float(v))
    full = None
    if len(signed) == 2**n:
        full = float(sum(v for _, v in signed.values())) / 2**n
    gen_mean = None
    if generators is not None:
        vals = []
        for g in generators:
            g = PauliString.parse(g)
            if g.letters not in signed:
                raise KeyError(f"missing expectation for generator {g}")
            sign, v = signed[g.letters]
            vals.append(v * sign * g.phase.real)
        gen_mean = float(np.mean(vals))
    if full is None and gen_mean is None:
        raise ValueError(f"need all {2**n} group expectations or the generator list")
    return full, gen_mean


# theta measurements -----------------------------------------------------------

def theta_angles(n=8):
    return [k * np.pi / n for k in range(n)]


def theta_operator(theta):
    """cos(theta) X + sin(theta) Y."""
    return np.array([[0, np.exp(-1j * theta)], [np.exp(1j * theta), 0]])


def theta_expectation(state, theta):
    """<M_theta^(x)n> on an n-qubit state."""
    rho = as_density(state)
    n = num_qubits(rho)
    m = np.array([[1]], dtype=complex)
    for _ in range(n):
        m = np.kron(m, theta_operator(theta))
    return float(np.real(np.trace(m @ rho)))


def ghz_population(state):
    rho = as_density(state)
    return float(np.real(rho[0, 0] + rho[-1, -1]))


def theta_fidelity(population, samples):
    """GHZ fidelity (C + P) / 2 from the population and the n coherence samples.

    ``samples[k]`` is <M_theta^(x)n> at theta = k pi / n; the coherence is
    C = (1/n) sum_k (-1)^k samples[k].  The default n is 8.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or len(samples) != 8:
        raise ValueError("theta_fidelity needs exactly 8 coherence samples")
    if not 0 <= population <= 1 + 1e-12:
        raise ValueError("population must lie in [0, 1]")
    signs = (-1) ** np.arange(len(samples))
    c = float(np.mean(signs * samples))
    return (c + population) / 2


def theta_fidelity_of_state(state):
    """Run the protocol on an 8-qubit state (vector or density operator)."""
    if num_qubits(np.asarray(state)) != 8:
        raise ValueError("theta protocol is defined here for eight qubits")
    samples = [theta_expectation(state, t) for t in theta_angles(8)]
    return theta_fidelity(ghz_population(state), samples)


# direct fidelity for sparse qudit targets ------------------------------------

def _digits_to_index(digits, d):
    bits = int(np.log2(d))
    return int("".join(format(int(c), f"0{bits}b") for c in digits), 2)


def support_pairs(support):
    """All unordered pairs of support kets, as (k, l) with k earlier."""
    return list(combinations(support, 2))


def offdiag_term_fidelities(rho, k, l):
    """Fidelities with (|k> +- |l>)/sqrt2 and (|k> +- i|l>)/sqrt2 for indices k, l."""
    rho = as_density(rho)
    out = {}
    for name, ph in (("+", 1), ("-", -1), ("+i", 1j), ("-i", -1j)):
        v = np.zeros(rho.shape[0], dtype=complex)
        v[k], v[l] = 1 / np.sqrt(2), ph / np.sqrt(2)
        out[name] = float(np.real(v.conj() @ rho @ v))
    return out


def offdiag_element(terms):
    """<l|rho|k> from the four term fidelities."""
    return 0.5 * (terms["+"] - terms["-"]) + 0.5j * (terms["+i"] - terms["-i"])


def direct_fidelity_offdiag(populations, terms, coefficients):
    """Fidelity with a sparse target from populations and off-diagonal terms.

    ``coefficients`` maps basis index -> target amplitude c_k,
    ``populations`` maps basis index -> <k|rho|k> and ``terms`` maps each
    pair (k, l) of support indices to its four term fidelities.
    """
    c = {int(k): complex(v) for k, v in coefficients.items()}
    norm = sum(abs(v) ** 2 for v in c.values())
    if abs(norm - 1) > 1e-9:
        raise ValueError(f"target coefficients have norm^2 {norm:.6g}, expected 1")
    f = sum(abs(c[k]) ** 2 * populations[k] for k in c)
    for (k, l), t in terms.items():
        f += 2 * np.real(np.conj(c[l]) * c[k] * offdiag_element(t))
    return float(np.real(f))


@dataclass
class QuditPlan:
    """Measurement plan for the off-diagonal method on a sparse qudit target."""

    pairs: list
    settings_per_pair: list
    projectors_per_setting: list
    diagonal_projectors: int

    @property
    def projector_count(self):
        return int(sum(s * p for s, p in zip(self.settings_per_pair, self.projectors_per_setting)))


def qudit_plan(support_digits, d=4):
    """Plan for every pair of support kets.

    A pair differing on m qudits is a two-level GHZ problem on those qudits:
    one Z setting for the populations plus every X/Y string (2^m) for the
    coherences, shared between the real and imaginary parts; each setting
    has 2^m outcome projectors.
    """
    pairs = support_pairs(list(support_digits))
    settings, projectors = [], []
    for k, l in pairs:
        m = sum(a != b for a, b in zip(k, l))
        settings.append(1 + 2**m)
        projectors.append(2**m)
    n = len(support_digits[0])
    return QuditPlan(pairs, settings, projectors, d**n)


def _qudit_embed(ops, d, n):
    """Kron of per-qudit d x d operators (None = identity)."""
    m = np.array([[1]], dtype=complex)
    for op in ops:
        m = np.kron(m, np.eye(d) if op is None else op)
    return m


def offdiag_via_settings(rho, k_digits, l_digits, d=4):
    """<l|rho|k> assembled from effective-qubit X/Y string expectations.

    On every qudit where k and l differ, the two-level subspace
    {|k_j>, |l_j>} is an effective qubit; elsewhere the common digit is
    projected.  |l><k| restricted to the effective qubits is the tensor
    product of (X + iY)/2, so <l|rho|k> follows from the 2^m X/Y string
    expectations.  Returns (value, number of settings used).
    """
    rho = as_density(rho)
    n = len(k_digits)
    diff = [j for j in range(n) if k_digits[j] != l_digits[j]]
    m = len(diff)

    def eff(letter, j):
        a, b = int(k_digits[j]), int(l_digits[j])
        op = np.zeros((d, d), dtype=complex)
        if letter == "X":
            op[a, b] = op[b, a] = 1
        else:
            op[b, a], op[a, b] = 1j, -1j
        return op

    common = []
    for j in range(n):
        if j in diff:
            common.append(None)
        else:
            p = np.zeros((d, d))
            p[int(k_digits[j]), int(k_digits[j])] = 1
            common.append(p)
    total = 0j
    for letters in product("XY", repeat=m):
        ops = list(common)
        for j, c in zip(diff, letters):
            ops[j] = eff(c, j)
        e = float(np.real(np.trace(_qudit_embed(ops, d, n) @ rho)))
        total += 1j ** letters.count("Y") * e
    return total / 2**m, 1 + 2**m


def direct_fidelity_from_rho(rho, coefficients, d=4):
    """Run the full off-diagonal protocol on ``rho`` for a sparse target.

    ``coefficients`` maps digit strings to amplitudes.  Off-diagonal
    elements come from the term fidelities of each support pair.
    """
    rho = as_density(rho)
    c = {_digits_to_index(k, d): v for k, v in coefficients.items()}
    pops = {k: float(np.real(rho[k, k])) for k in c}
    idx = sorted(c)
    terms = {(k, l): offdiag_term_fidelities(rho, k, l) for k, l in combinations(idx, 2)}
    return direct_fidelity_offdiag(pops, terms, c)


# counts -------------------------------------------------------------------------

_ROTATE = {"X": H, "Y": H @ rz(-np.pi / 2), "Z": np.eye(2), "I": np.eye(2)}


@dataclass
class CountsRecord:
    setting: MeasurementSetting
    counts: np.ndarray
    shots: int
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.sum() != self.shots or (self.counts < 0).any():
            raise ValueError("histogram must be non-negative and sum to shots")

    def to_json(self):
        return json.dumps({
            "setting": self.setting.axes,
            "entangled": [list(p) for p in self.setting.entangled],
            "shots": int(self.shots),
            "seed": self.seed,
            "counts": {format(i, f"0{self.setting.n}b"): int(c)
                       for i, c in enumerate(self.counts) if c},
        })

    @classmethod
    def from_json(cls, line):
        data = json.loads(line)
        s = MeasurementSetting(data["setting"], tuple(tuple(p) for p in data["entangled"]))
        counts = np.zeros(2**s.n, dtype=np.int64)
        for bits, c in data["counts"].items():
            counts[int(bits, 2)] = c
        return cls(s, counts, data["shots"], data["seed"])


def outcome_probabilities(state, setting: MeasurementSetting):
    """Exact outcome distribution of a setting, indexed by the readout bit string."""
    state = np.asarray(state, dtype=complex)
    n = num_qubits(state)
    if setting.n != n:
        raise ValueError("setting length does not match the state")
    paired = {q for pr in setting.entangled for q in pr}
    for a, b in setting.entangled:
        state = apply_unitary(state, CX, [a, b])
        state = apply_unitary(state, H, [a])
    for q, c in enumerate(setting.axes):
        if q not in paired and c != "Z":
            state = apply_unitary(state, _ROTATE[c], [q])
    p = np.real(np.diag(state)) if state.ndim == 2 else np.abs(state) ** 2
    p = np.clip(p, 0, None)
    return p / p.sum()


def simulate_counts(state, setting, shots, seed=None):
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if isinstance(setting, str):
        setting = MeasurementSetting(setting)
    p = outcome_probabilities(state, setting)
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return CountsRecord(setting, counts, shots, seed)


def _readout_signature(letters, setting):
    """Readout parity mask and sign for a derivable Pauli string."""
    mask = [0] * setting.n
    sign = 1
    paired = set()
    for a, b in setting.entangled:
        paired |= {a, b}
        pair = letters[a] + letters[b]
        if pair == "XX":
            mask[a] = 1
        elif pair == "ZZ":
            mask[b] = 1
        elif pair == "YY":
            mask[a] = mask[b] = 1
            sign = -sign
    for q, c in enumerate(letters):
        if q not in paired and c != "I":
            mask[q] = 1
    return mask, sign


def expectation_from_counts(counts, setting, stabilizer):
    """Estimate a derivable signed Pauli string from a histogram."""
    P = PauliString.parse(stabilizer)
    if not setting.derives(P):
        raise ValueError(f"{P} is not derivable from setting {setting}")
    mask, sign = _readout_signature(P.letters, setting)
    n = setting.n
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    parity = (bits[:, np.asarray(mask, dtype=bool)].sum(axis=1) % 2) if any(mask) else np.zeros(len(idx), int)
    values = 1 - 2 * parity
    counts = np.asarray(counts, dtype=float)
    return float(sign * P.phase.real * (values @ counts) / counts.sum())


def bootstrap_errorbar(record, statistic, rounds=1000, seed=None):
    """Mean and standard deviation of ``statistic`` over Poisson-resampled histograms."""
    rng = np.random.default_rng(seed)
    counts = np.asarray(record.counts if isinstance(record, CountsRecord) else record)
    samples = rng.poisson(counts, size=(rounds, len(counts)))
    vals = []
    for s in samples:
        if s.sum() == 0:
            continue
        vals.append(statistic(s))
    vals = np.asarray(vals, dtype=float)
    return float(vals.mean()), float(vals.std(ddof=1))


def state_expectations(state, stabilizers):
    """Exact expectation of each signed Pauli string (helper for fidelity checks)."""
    out = {}
    for s in stabilizers:
        P = PauliString.parse(s)
        out[str(P)] = P.phase.real * pauli_expectation(state, PauliString(P.letters))
    return out
