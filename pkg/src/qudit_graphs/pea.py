"""Iterative phase estimation driven by measurements on L3 or crazy6.

Bit k of phi0 = 0.b1 b2 ... bm is read with M = 2^(k-1) and the feedback
phase theta_k = sum_{j>k} b_j 2^(k-1-j) built from already inferred bits,
starting from the last bit.  A single MBQC run measures the first vertex at
2 pi M phi0, the middle vertex at 0 and the last at -2 pi theta; outcome 0
occurs with probability cos^2[pi (M phi0 - theta)].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core.states import as_density, dephase, measure_projective
from .graphs import build_state, crazy6, line
from .mbqc import logical_basis, xy_basis


def bit_probability(M, phi0, theta):
    """Probability of outcome 0: cos^2[pi (M phi0 - theta)]."""
    if M < 1:
        raise ValueError("M must be at least 1")
    return float(np.cos(np.pi * (M * phi0 - theta)) ** 2)


def schedule_theta(bits_after, k):
    """theta_k from the inferred bits b_{k+1}..b_m (``bits_after[j]`` is b_{k+1+j})."""
    return sum(b * 2.0 ** (k - 1 - (k + 1 + j)) for j, b in enumerate(bits_after))


def phase_bits(phi0, m):
    """First m binary digits of phi0 in [0, 1) (truncated)."""
    v = int(np.floor((phi0 % 1.0) * 2**m + 1e-9)) % 2**m
    return [int(c) for c in format(v, f"0{m}b")]


@lru_cache(maxsize=4096)
def _outcome_one_probability(encoding, a, c, p):
    """P(last outcome = 1 | earlier outcomes 0 and valid) by density-matrix simulation."""
    if encoding == "physical":
        rho = as_density(build_state(line(3)))
        if p:
            rho = dephase(rho, 1, p)
        _, _, rho = measure_projective(rho, xy_basis(a), [0], outcome=0)
        _, _, rho = measure_projective(rho, xy_basis(0.0), [0], outcome=0)
        b = xy_basis(c)
        return float(np.real(b[:, 1].conj() @ rho @ b[:, 1]))
    if encoding == "logical":
        rho = as_density(build_state(crazy6()))
        if p:
            rho = dephase(rho, 2, p)
            rho = dephase(rho, 3, p)
        _, _, rho = measure_projective(rho, logical_basis("XY_L", a), [0, 1], outcome=0)
        _, _, rho = measure_projective(rho, logical_basis("XY_L", 0.0), [0, 1], outcome=0)
        b = logical_basis("XY_L", c)
        p0 = float(np.real(b[:, 0].conj() @ rho @ b[:, 0]))
        p1 = float(np.real(b[:, 1].conj() @ rho @ b[:, 1]))
        return p1 / (p0 + p1)
    raise ValueError(f"unknown encoding {encoding!r}")


def mbqc_bit_probability(M, phi0, theta, encoding="physical", p=0.0):
    """P(1) of one post-selected MBQC run (``p``: dephasing on the middle layer)."""
    a = float((2 * np.pi * M * phi0) % (2 * np.pi))
    c = float((-2 * np.pi * theta) % (2 * np.pi))
    return _outcome_one_probability(encoding, round(a, 12), round(c, 12), float(p))


@dataclass
class BitRecord:
    k: int
    M: int
    theta: float
    ones: int
    samples: int
    p1: float
    p1_exact: float
    bit: int
    correct: bool


@dataclass
class PeaRun:
    phi0: float
    m: int
    samples: int
    encoding: str
    p: float
    seed: int | None
    records: list = field(default_factory=list)

    @property
    def bits(self):
        """Inferred bits b1..bm."""
        return [r.bit for r in sorted(self.records, key=lambda r: r.k)]

    @property
    def estimate(self):
        return sum(b * 2.0 ** -(i + 1) for i, b in enumerate(self.bits))

    @property
    def correct_bits(self):
        return sum(r.correct for r in self.records)


def pea_run(phi0, m=3, samples=17, encoding="physical", p=0.0, seed=None, exact=False):
    """Infer m bits of phi0 by majority vote over ``samples`` runs per bit.

    With ``exact`` the per-bit P(1) is the exact run probability and the bit
    is 1 iff P(1) > 1/2; otherwise outcomes are sampled.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    true_bits = phase_bits(phi0, m)
    run = PeaRun(phi0, m, samples, encoding, p, seed)
    inferred = {}
    for k in range(m, 0, -1):
        M = 2 ** (k - 1)
        theta = schedule_theta([inferred[j] for j in range(k + 1, m + 1)], k)
        p1 = mbqc_bit_probability(M, phi0, theta, encoding, p)
        if exact:
            ones, est = None, p1
            bit = int(p1 > 0.5)
        else:
            ones = int(rng.binomial(samples, min(max(p1, 0.0), 1.0)))
            est = ones / samples
            bit = int(2 * ones > samples)
        inferred[k] = bit
        run.records.append(BitRecord(k, M, theta, ones if ones is not None else -1, samples,
                                     est, p1, bit, bit == true_bits[k - 1]))
    return run


def correct_counts(run: PeaRun):
    """(samples agreeing with the true bit, samples) per bit, ordered by k."""
    out = []
    true_bits = phase_bits(run.phi0, run.m)
    for r in sorted(run.records, key=lambda r: r.k):
        good = r.ones if true_bits[r.k - 1] == 1 else r.samples - r.ones
        out.append((good, r.samples))
    return out


def bootstrap_confidence(physical, logical, rounds=10_000, seed=None, unit="bit", bits_per_phase=3):
    """Fraction of bootstrap rounds in which the logical encoding wins.

    ``physical`` and ``logical`` are sequences of (correct samples, samples)
    per bit-case.  Each round resamples every bit binomially; a bit is right
    when a strict majority of its resampled samples is right.  With
    ``unit="phase"`` consecutive groups of ``bits_per_phase`` bits are
    scored together.  Logical wins a round only if it has strictly more
    correct units.
    """
    rng = np.random.default_rng(seed)

    def score(counts):
        counts = np.asarray(counts, dtype=float)
        if counts.size == 0 or np.any(counts[:, 1] < 1):
            raise ValueError("every bit needs at least one sample")
        n = counts[:, 1].astype(int)
        q = counts[:, 0] / counts[:, 1]
        draws = rng.binomial(n[None, :], q[None, :], size=(rounds, len(n)))
        ok = 2 * draws > n[None, :]
        if unit == "phase":
            ok = ok.reshape(rounds, -1, bits_per_phase).all(axis=2)
        elif unit != "bit":
            raise ValueError(f"unknown unit {unit!r}")
        return ok.sum(axis=1)

    n_phys = score(physical)
    n_log = score(logical)
    return float(np.mean(n_log > n_phys))


def pea_table(phis=None, m=3, samples=17, encodings=("physical", "logical"), p=0.0, seed=0, exact=False):
    """Rows (phi0, bit, encoding, P1, correct) for every phase and bit."""
    if phis is None:
        phis = [k / 2**m for k in range(2**m)]
    seeds = np.random.SeedSequence(seed).spawn(len(phis) * len(encodings))
    rows = []
    runs = []
    i = 0
    for enc in encodings:
        for phi in phis:
            r = pea_run(phi, m, samples, enc, p, seed=seeds[i], exact=exact)
            i += 1
            runs.append(r)
            for rec in sorted(r.records, key=lambda x: x.k):
                rows.append((float(phi), rec.k, enc, float(rec.p1), bool(rec.correct)))
    return rows, runs
