"""GHZ generation rates for qubit and qudit photonic encodings.

A GHZ state of n qubits is built from photon pairs fused together.  With
qudits of dimension d each photon carries log2(d) qubits, so fewer pairs
and fewer fusions are needed, at the price of deeper local meshes (loss
eta^(d-1) per photon).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class RateParams:
    s: float = 0.03             # pair generation probability per pulse
    rep_rate: float = 5e8       # Hz
    p_fuse: float = 0.5
    eta: float = 0.95           # per-MZI transmission
    collection: float = 0.05    # per-photon channel efficiency (coupling, filters, detection)
    d_max: int = 16
    photon_max: int = 10

    def __post_init__(self):
        for name in ("s", "p_fuse", "eta", "collection"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.rep_rate <= 0:
            raise ValueError("rep_rate must be positive")
        if self.d_max < 2 or self.d_max & (self.d_max - 1):
            raise ValueError("d_max must be a power of two")
        if self.photon_max < 2:
            raise ValueError("photon_max must be at least 2")


def photon_count(n, d):
    """Photons for n qubits at dimension d, rounded up to whole pairs."""
    if n < 2:
        raise ValueError("a GHZ state needs at least two qubits")
    if d < 2 or d & (d - 1):
        raise ValueError("d must be a power of two")
    k = int(math.log2(d))
    photons = -(-n // k)
    return photons + photons % 2


@dataclass
class Rate:
    n: int
    encoding: str
    d: int
    photons: int
    pairs: int
    fusions: int
    factors: dict

    @property
    def rate(self):
        return math.prod(self.factors.values())


def qudit_rate(n, d, params=RateParams()):
    """rep_rate * s^pairs * p_fuse^(pairs-1) * (collection * eta^(d-1))^photons."""
    if d > params.d_max:
        raise ValueError(f"d = {d} exceeds d_max = {params.d_max}")
    photons = photon_count(n, d)
    if photons > params.photon_max:
        raise ValueError(f"{photons} photons exceed photon_max = {params.photon_max}")
    pairs = photons // 2
    factors = {
        "rep_rate": params.rep_rate,
        "source": params.s ** pairs,
        "fusion": params.p_fuse ** (pairs - 1),
        "loss": (params.collection * params.eta ** (d - 1)) ** photons,
    }
    return Rate(n, f"qudit(d={d})", d, photons, pairs, pairs - 1, factors)


def qubit_rate(n, params=RateParams()):
    """One photon per qubit, pairs fused in a chain; no photon cap."""
    if n < 2:
        raise ValueError("a GHZ state needs at least two qubits")
    photons = n + n % 2
    pairs = photons // 2
    factors = {
        "rep_rate": params.rep_rate,
        "source": params.s ** pairs,
        "fusion": params.p_fuse ** (pairs - 1),
        "loss": (params.collection * params.eta) ** photons,
    }
    return Rate(n, "qubit", 2, photons, pairs, pairs - 1, factors)


def ghz_rate(n, encoding="qubit", params=RateParams(), d=None):
    if encoding == "qubit":
        return qubit_rate(n, params)
    if encoding == "qudit":
        if d is None:
            raise ValueError("qudit encoding needs d")
        return qudit_rate(n, d, params)
    raise ValueError(f"unknown encoding {encoding!r}")


def feasible_dims(n, params=RateParams()):
    out = []
    d = 2
    while d <= params.d_max:
        if photon_count(n, d) <= params.photon_max:
            out.append(d)
        d *= 2
    return out


def best_qudit(n, params=RateParams()):
    """Highest-rate feasible qudit dimension (d = 2 included), or None."""
    best = None
    for d in feasible_dims(n, params):
        r = qudit_rate(n, d, params)
        if best is None or r.rate > best.rate:
            best = r
    return best


def compare_encodings(ns=range(2, 41), params=RateParams()):
    """Rows (n, qubit_rate, qudit_rate, d_opt); qudit_rate is 0 when infeasible."""
    rows = []
    for n in ns:
        q = qubit_rate(n, params)
        b = best_qudit(n, params)
        rows.append((n, q.rate, b.rate if b else 0.0, b.d if b else None))
    return rows


def params_dict(params=RateParams()):
    return asdict(params)
