"""Signed Pauli strings and weighted sums of them."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .states import I2, X, Y, Z, is_density, num_qubits

MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}
PHASES = (1, 1j, -1, -1j)

# single-letter products: (a, b) -> (phase, letter)
_PRODUCT = {}
for _a, _b in product("IXYZ", repeat=2):
    _m = MATRICES[_a] @ MATRICES[_b]
    for _c in "IXYZ":
        for _ph in PHASES:
            if np.allclose(_m, _ph * MATRICES[_c]):
                _PRODUCT[_a, _b] = (_ph, _c)


def _clean_phase(phase):
    for ph in PHASES:
        if abs(phase - ph) < 1e-9:
            return ph
    raise ValueError(f"phase {phase} not in {{+1, -1, +i, -i}}")


@dataclass(frozen=True)
class PauliString:
    letters: str
    phase: complex = 1

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "phase", _clean_phase(complex(self.phase)))

    @classmethod
    def parse(cls, text):
        """Parse ``"XZZ"``, ``"-XZZ"``, ``"+iXZ"`` or ``"-iYY"``."""
        if isinstance(text, PauliString):
            return text
        s = text.strip()
        phase = 1
        if s[:1] in "+-":
            phase = -1 if s[0] == "-" else 1
            s = s[1:]
        if s[:1] == "i":
            phase *= 1j
            s = s[1:]
        return cls(s, phase)

    @property
    def n(self):
        return len(self.letters)

    @property
    def weight(self):
        return sum(c != "I" for c in self.letters)

    @property
    def is_hermitian(self):
        return self.phase in (1, -1)

    def __mul__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("length mismatch")
        phase = self.phase * other.phase
        letters = []
        for a, b in zip(self.letters, other.letters):
            ph, c = _PRODUCT[a, b]
            phase *= ph
            letters.append(c)
        return PauliString("".join(letters), phase)

    def __neg__(self):
        return PauliString(self.letters, -self.phase)

    def commutes(self, other):
        anti = sum(
            a != "I" and b != "I" and a != b for a, b in zip(self.letters, other.letters)
        )
        return anti % 2 == 0

    def matrix(self):
        m = np.array([[1]], dtype=complex)
        for c in self.letters:
            m = np.kron(m, MATRICES[c])
        return self.phase * m

    def __str__(self):
        sign = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return sign + self.letters


def _apply_letters(state, letters):
    """Apply the unsigned Pauli ``letters`` to the vector ``state``."""
    n = len(letters)
    t = state.reshape((2,) * n)
    for q, c in enumerate(letters):
        if c == "I":
            continue
        t = np.moveaxis(np.tensordot(MATRICES[c], t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def pauli_expectation(state, P) -> float:
    """Expectation of a Hermitian PauliString on a vector or density operator."""
    P = PauliString.parse(P)
    if not P.is_hermitian:
        raise ValueError("expectation requires a Hermitian Pauli string (phase +-1)")
    state = np.asarray(state, dtype=complex)
    n = num_qubits(state)
    if P.n != n:
        raise ValueError(f"Pauli string of length {P.n} on {n} qubits")
    if is_density(state):
        val = np.trace(P.matrix() @ state)
    else:
        val = np.vdot(state, _apply_letters(state, P.letters)) * P.phase
    return float(np.real(val))


class PauliSum:
    """Weighted sum of Pauli strings, used for hypergraph stabilizers."""

    def __init__(self, terms=None):
        self.terms = {}
        for letters, coeff in (terms or {}).items():
            self._add(letters, coeff)

    def _add(self, letters, coeff):
        c = self.terms.get(letters, 0) + coeff
        if abs(c) < 1e-12:
            self.terms.pop(letters, None)
        else:
            self.terms[letters] = c

    @classmethod
    def from_pauli(cls, P, coeff=1.0):
        P = PauliString.parse(P)
        return cls({P.letters: coeff * P.phase})

    @property
    def n(self):
        return len(next(iter(self.terms)))

    def __add__(self, other):
        out = PauliSum(self.terms)
        for k, v in other.terms.items():
            out._add(k, v)
        return out

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return PauliSum({k: v * other for k, v in self.terms.items()})
        out = PauliSum()
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                prod = PauliString(a) * PauliString(b)
                out._add(prod.letters, ca * cb * prod.phase)
        return out

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def matrix(self):
        return sum(c * PauliString(k).matrix() for k, c in self.terms.items())

    def expectation(self, state) -> float:
        total = 0j
        for letters, c in self.terms.items():
            total += c * pauli_expectation(state, PauliString(letters))
        return float(np.real(total))

    def isclose(self, other, atol=1e-9):
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) < atol for k in keys)

    def __repr__(self):
        parts = [f"{c.real:+.4g}{k}" if abs(c.imag) < 1e-12 else f"{c:+.4g}{k}"
                 for k, c in sorted(self.terms.items())]
        return "PauliSum(" + " ".join(parts) + ")"
