"""Graph and hypergraph states.

Vertices are 0-based array positions.  The JSON exchange format uses
1-based vertices, as do chip qubit labels inside recipes (see
:mod:`qudit_graphs.recipes`).
"""
from __future__ import annotations

import json
from itertools import combinations

import numpy as np

from .core.pauli import PauliString, PauliSum
from .core.states import Z, apply_unitary, ket, measure_projective, num_qubits, plus_state

SQRT_MINUS_IX = (np.eye(2) - 1j * np.array([[0, 1], [1, 0]])) / np.sqrt(2)
SQRT_IZ = np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)])


class Hypergraph:
    """Vertices ``0..n-1`` and a set of hyperedges of size >= 2."""

    __slots__ = ("n", "edges")

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        canon = set()
        for e in edges:
            e = tuple(sorted(int(v) for v in e))
            if len(e) < 2 or len(set(e)) != len(e):
                raise ValueError(f"edge {e} must contain at least two distinct vertices")
            if e[0] < 0 or e[-1] >= n:
                raise ValueError(f"edge {e} out of range for {n} vertices")
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
        self.n = n
        self.edges = frozenset(canon)

    @property
    def is_graph(self):
        return all(len(e) == 2 for e in self.edges)

    def neighbors(self, v):
        return sorted({u for e in self.edges if v in e and len(e) == 2 for u in e} - {v})

    def sorted_edges(self):
        return sorted(self.edges, key=lambda e: (len(e), e))

    def adjacency(self):
        if not self.is_graph:
            raise ValueError("adjacency matrix is only defined for graphs")
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    def relabel(self, order):
        """New hypergraph whose vertex i is old vertex ``order[i]``."""
        pos = {old: new for new, old in enumerate(order)}
        if sorted(pos) != list(range(self.n)):
            raise ValueError("order must be a permutation")
        return Hypergraph(self.n, [[pos[v] for v in e] for e in self.edges])

    def __eq__(self, other):
        return isinstance(other, Hypergraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Hypergraph(n={self.n}, edges={self.sorted_edges()})"

    def to_json(self):
        return json.dumps({"n": self.n, "edges": [[v + 1 for v in e] for e in self.sorted_edges()]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        if set(data) != {"n", "edges"}:
            raise ValueError("graph JSON needs exactly the keys 'n' and 'edges'")
        for e in data["edges"]:
            if any(v < 1 or v > data["n"] for v in e):
                raise ValueError("graph JSON vertices are 1-based")
        return cls(data["n"], [[v - 1 for v in e] for e in data["edges"]])


def _bit_table(n):
    idx = np.arange(2**n)
    return (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1


def build_state(h: Hypergraph):
    """prod_e C^{|e|}Z |+>^n."""
    if h.n == 0:
        return np.ones(1, dtype=complex)
    bits = _bit_table(h.n)
    sign = np.ones(2**h.n)
    for e in h.edges:
        sign[np.all(bits[:, list(e)] == 1, axis=1)] *= -1
    return plus_state(h.n) * sign


def _czk_polynomial(n, vertices):
    """C^kZ on ``vertices`` as a sum of Z strings: I - 2 prod (I - Z)/2."""
    k = len(vertices)
    terms = {"I" * n: 1.0}
    for r in range(k + 1):
        for sub in combinations(vertices, r):
            letters = ["I"] * n
            for v in sub:
                letters[v] = "Z"
            key = "".join(letters)
            terms[key] = terms.get(key, 0) - 2 * (-1) ** r / 2**k
    return PauliSum(terms)


def stabilizer_generators(h: Hypergraph):
    """One generator per vertex.

    For graphs these are PauliStrings ``X_v Z_N(v)``; for hypergraphs they
    are PauliSums ``X_v prod_{e containing v} C^{|e|-1}Z_{e - v}``.
    """
    gens = []
    for v in range(h.n):
        if h.is_graph:
            letters = ["I"] * h.n
            letters[v] = "X"
            for u in h.neighbors(v):
                letters[u] = "Z"
            gens.append(PauliString("".join(letters)))
            continue
        letters = ["I"] * h.n
        letters[v] = "X"
        op = PauliSum({"".join(letters): 1.0})
        for e in h.sorted_edges():
            if v in e:
                op = op * _czk_polynomial(h.n, [u for u in e if u != v])
        gens.append(op)
    return gens


def stabilizer_group(generators):
    """All products of subsets of the generators (2^n elements, identity first)."""
    gens = list(generators)
    n = len(gens)
    group = []
    for mask in range(2**n):
        chosen = [g for i, g in enumerate(gens) if mask >> i & 1]
        if isinstance(gens[0], PauliString):
            acc = PauliString("I" * gens[0].n)
        else:
            acc = PauliSum({"I" * gens[0].n: 1.0})
        for g in chosen:
            acc = acc * g
        group.append(acc)
    return group


def local_complement(g: Hypergraph, v):
    """Toggle every edge inside the neighbourhood of ``v``."""
    if not g.is_graph:
        raise ValueError("local complementation is defined for graphs only")
    edges = set(g.edges)
    for a, b in combinations(g.neighbors(v), 2):
        edges ^= {(a, b)}
    return Hypergraph(g.n, edges)


def lc_unitary(g: Hypergraph, v):
    """Local gates mapping |g> to |LC_v(g)> up to a global phase."""
    gates = [(SQRT_MINUS_IX, v)]
    gates += [(SQRT_IZ, u) for u in g.neighbors(v)]
    return gates


def apply_gates(state, gates):
    for gate, q in gates:
        state = apply_unitary(state, gate, [q])
    return state


def toggle_cz(h: Hypergraph, u, v):
    if u == v:
        raise ValueError("CZ needs two distinct vertices")
    return Hypergraph(h.n, set(h.edges) ^ {tuple(sorted((u, v)))})


def delete_vertex(h: Hypergraph, v):
    """Drop ``v`` and every edge containing it; later vertices shift down."""
    keep = [u for u in range(h.n) if u != v]
    pos = {u: i for i, u in enumerate(keep)}
    return Hypergraph(h.n - 1, [[pos[u] for u in e] for e in h.edges if v not in e])


def z_measure_vertex(state, h: Hypergraph, v, outcome):
    """Forced Z measurement of vertex ``v`` of the hypergraph state ``state``.

    Returns ``(post_state, residual, byproducts)``.  For outcome 1 every edge
    containing ``v`` is replaced by its remainder: remainders with two or more
    vertices are toggled in the residual hypergraph, single-vertex remainders
    become ``("Z", u)`` byproducts.  Vertex numbers in the residual and the
    byproducts refer to the state with ``v`` removed.  Up to a global phase,
    ``post_state`` equals the byproducts applied to ``build_state(residual)``.
    """
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    num_qubits(state)
    _, _, post = measure_projective(state, np.eye(2), [v], outcome=outcome)
    keep = [u for u in range(h.n) if u != v]
    pos = {u: i for i, u in enumerate(keep)}
    edges = {tuple(pos[u] for u in e) for e in h.edges if v not in e}
    byproducts = []
    if outcome == 1:
        for e in h.sorted_edges():
            if v not in e:
                continue
            rest = tuple(pos[u] for u in e if u != v)
            if len(rest) == 1:
                byproducts.append(("Z", rest[0]))
            else:
                edges ^= {rest}
    return post, Hypergraph(h.n - 1, edges), byproducts


def apply_byproducts(state, byproducts):
    for kind, q in byproducts:
        if kind != "Z":
            raise ValueError(f"unknown byproduct {kind}")
        state = apply_unitary(state, Z, [q])
    return state


# named graphs -------------------------------------------------------------

def star(n):
    return Hypergraph(n, [(0, k) for k in range(1, n)])


def line(n):
    return Hypergraph(n, [(k, k + 1) for k in range(n - 1)])


def complete(n):
    return Hypergraph(n, combinations(range(n), 2))


def cycle(n):
    return Hypergraph(n, [(k, (k + 1) % n) for k in range(n)])


def box4():
    return cycle(4)


def branched(k):
    """B_k: two outer vertices joined to every one of k-2 mutually unlinked middle vertices.

    Vertex order follows the chip labels (1..k), with the outer pair at
    positions 2 and 3; for k = 3 the order is (1, 3, 4), so the outer pair
    sits at positions 1 and 2.
    """
    if k < 3:
        raise ValueError("branched graphs need at least three vertices")
    outer = (1, 2) if k == 3 else (2, 3)
    middle = [v for v in range(k) if v not in outer]
    return Hypergraph(k, [(o, m) for o in outer for m in middle])


def branched_layout(k):
    """(outer pair, middle vertices) positions of :func:`branched`."""
    outer = (1, 2) if k == 3 else (2, 3)
    return outer, [v for v in range(k) if v not in outer]


def crazy6():
    """Logical three-vertex line on columns (0,1), (2,3), (4,5)."""
    return branched(6)


CLOVER_CENTER = 4


def clover():
    """Four outer vertices plus a centre (last vertex).

    Two plain edges (0,1), (2,3) and four 3-edges through the centre, so that
    measuring the centre leaves Bell pairs (0-1)(2-3) for outcome 0 and
    (0-3)(1-2) for outcome 1.
    """
    c = CLOVER_CENTER
    return Hypergraph(5, [(0, 1), (2, 3), (0, 1, c), (2, 3, c), (0, 3, c), (1, 2, c)])


def toffoli():
    return Hypergraph(3, [(0, 1, 2)])


def fc_toffoli():
    return Hypergraph(3, [(0, 1), (0, 2), (1, 2), (0, 1, 2)])


def bell_pairs(pairs, n=4):
    return Hypergraph(n, pairs)


NAMED_GRAPHS = {
    "star4": lambda: star(4),
    "star8": lambda: star(8),
    "L3": lambda: line(3),
    "L4": lambda: line(4),
    "L5": lambda: line(5),
    "box4": box4,
    "B3": lambda: branched(3),
    "B5": lambda: branched(5),
    "B7": lambda: branched(7),
    "crazy6": crazy6,
    "clover": clover,
    "toffoli": toffoli,
    "fc_toffoli": fc_toffoli,
}


def named_graph(name):
    try:
        return NAMED_GRAPHS[name]()
    except KeyError:
        raise KeyError(f"unknown named state {name!r}; choose from {sorted(NAMED_GRAPHS)}")
