"""Small Fock-space linear-optics simulator based on matrix permanents.

Used as an independent oracle for the qudit-level fusion model.  Photon
numbers are tiny (at most four), so everything is exact.
"""
from __future__ import annotations

from collections import Counter
from itertools import permutations, product
from math import factorial, prod

import numpy as np

MAX_PHOTONS = 4


def _gray_flips(n):
    """Yield (column, sign) for the Gray-code walk over non-empty column subsets."""
    for k in range(1, 2**n):
        col = (k & -k).bit_length() - 1
        gray = k ^ (k >> 1)
        yield col, 1 if gray >> col & 1 else -1, bin(gray).count("1")


def permanent(m):
    """Permanent by Ryser's formula with Gray-code subset ordering."""
    m = np.asarray(m, dtype=complex)
    return complex(permanent_batch(m[None])[0])


def permanent_batch(ms):
    """Permanents of a stack of square matrices with shape (B, n, n)."""
    ms = np.asarray(ms, dtype=complex)
    b, n = ms.shape[0], ms.shape[-1]
    if n == 0:
        return np.ones(b, dtype=complex)
    row_sums = np.zeros((b, n), dtype=complex)
    total = np.zeros(b, dtype=complex)
    for col, sign, size in _gray_flips(n):
        row_sums += sign * ms[:, :, col]
        total += (-1) ** size * np.prod(row_sums, axis=1)
    return (-1) ** n * total


def _as_unitary(network):
    u = np.asarray(network, dtype=complex)
    m = u.shape[0]
    if u.shape != (m, m) or not np.allclose(u.conj().T @ u, np.eye(m), atol=1e-10):
        raise ValueError("optical network must be a square unitary")
    return u


def _modes_from_occupation(occ):
    return [mode for mode, k in enumerate(occ) for _ in range(int(k))]


def fock_amplitude(network, inp, out) -> complex:
    """Transition amplitude <out| U |inp> for Fock occupation tuples."""
    u = _as_unitary(network)
    inp, out = tuple(inp), tuple(out)
    if len(inp) != u.shape[0] or len(out) != u.shape[0]:
        raise ValueError("occupation length must equal the number of modes")
    if min(inp + out) < 0:
        raise ValueError("occupations must be non-negative")
    if sum(inp) != sum(out):
        return 0j
    if sum(inp) > MAX_PHOTONS:
        raise ValueError(f"at most {MAX_PHOTONS} photons supported")
    rows = _modes_from_occupation(out)
    cols = _modes_from_occupation(inp)
    sub = u[np.ix_(rows, cols)]
    norm = np.sqrt(prod(factorial(k) for k in inp) * prod(factorial(k) for k in out))
    return permanent(sub) / norm


def fock_outputs(n_photons, n_modes):
    """All occupation tuples with ``n_photons`` in ``n_modes``."""
    for combo in product(range(n_photons + 1), repeat=n_modes):
        if sum(combo) == n_photons:
            yield combo


def _labelled_branches(u, terms, labels, groups):
    """One unnormalised output vector per distinct output label pattern."""
    n = len(labels)
    sizes = [len(g) for g in groups]
    dim = prod(sizes)
    choices = list(product(*[range(s) for s in sizes]))
    out_modes = np.array([[groups[g][c] for g, c in enumerate(ch)] for ch in choices])
    patterns = sorted(set(permutations(labels)))
    branches = []
    in_norms = []
    for _, modes in terms:
        occ = Counter(zip(modes, labels))
        in_norms.append(np.sqrt(prod(factorial(k) for k in occ.values())))
    lab_in = np.asarray(labels)
    for pattern in patterns:
        lab_out = np.asarray(pattern)
        mask = lab_out[:, None] == lab_in[None, :]
        psi = np.zeros(dim, dtype=complex)
        for (amp, modes), norm in zip(terms, in_norms):
            sub = u[out_modes[:, :, None], np.asarray(modes)[None, None, :]] * mask
            psi += amp * permanent_batch(sub) / norm
        branches.append(psi)
    return branches


def _density(branches):
    return sum(np.outer(b, b.conj()) for b in branches)


def run_postselected(network, terms, groups, labels=None, epsilon=None):
    """Propagate a superposition of photon configurations and post-select.

    ``terms`` is a list of ``(amplitude, modes)`` where ``modes[k]`` is the
    input mode of photon ``k``.  Photons carry internal ``labels``; photons
    with different labels do not interfere.  ``epsilon`` interpolates
    linearly between fully indistinguishable photons (0) and the given
    labels (1); by default the labels are used as given.

    The pattern keeps events with exactly one photon in each mode group;
    the group outcome is the position of the photon inside its group.
    Returns ``(state, probability)`` where the state is a vector when the
    result is pure and a density operator otherwise.
    """
    u = _as_unitary(network)
    n = len(terms[0][1])
    if n > MAX_PHOTONS:
        raise ValueError(f"at most {MAX_PHOTONS} photons supported")
    if len(groups) != n:
        raise ValueError("need one mode group per photon")
    flat = [m for g in groups for m in g]
    if len(set(flat)) != len(flat):
        raise ValueError("mode groups must be disjoint")
    labels = tuple(labels) if labels is not None else (0,) * n
    if epsilon is not None and not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon == 0 or len(set(labels)) == 1:
        (psi,) = _labelled_branches(u, terms, (0,) * n, groups)
        prob = float(np.vdot(psi, psi).real)
        if prob < 1e-14:
            return None, 0.0
        return psi / np.sqrt(prob), prob
    rho = _density(_labelled_branches(u, terms, labels, groups))
    if epsilon is not None:
        coherent = _density(_labelled_branches(u, terms, (0,) * n, groups))
        rho = (1 - epsilon) * coherent + epsilon * rho
    prob = float(np.real(np.trace(rho)))
    if prob < 1e-14:
        return None, 0.0
    return rho / prob, prob
