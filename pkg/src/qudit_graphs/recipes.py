"""Replayable state-generation recipes on the four-photon chip.

Qubits inside a recipe are named by chip label 1..8: photon A carries
qubits (1, 2), B carries (3, 4), C carries (5, 6) and D carries (7, 8).
A recipe starts from a seed state produced by the sources and fusion gate
and applies qudit-local operations and Z projections.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core.states import CX, CZ, H, Z, apply_unitary, fidelity, ghz_state, measure_projective, permute_qubits, rz
from .graphs import (
    Hypergraph, apply_gates, branched, box4, build_state, clover, fc_toffoli, lc_unitary,
    line, local_complement, star, toffoli, toggle_cz, z_measure_vertex,
)

FOUR_P_FOUR_D = {
    "0000": 0.0, "0033": -np.pi / 4, "1111": np.pi / 2, "1212": 0.0,
    "2121": np.pi / 4, "2222": -np.pi / 4, "3300": np.pi / 2, "3333": np.pi / 4,
}


def qudit_ket_state(amplitudes, d=4):
    """Qubit state vector from a dict of qudit strings -> amplitude (or phase)."""
    bits_per = int(np.log2(d))
    n = len(next(iter(amplitudes))) * bits_per
    psi = np.zeros(2**n, dtype=complex)
    for digits, amp in amplitudes.items():
        bits = "".join(format(int(c), f"0{bits_per}b") for c in digits)
        psi[int(bits, 2)] += amp
    return psi / np.linalg.norm(psi)


def four_p_four_d_state():
    """The eight-term four-photon four-dimensional target state."""
    return qudit_ket_state({k: np.exp(1j * ph) for k, ph in FOUR_P_FOUR_D.items()})


def seed_state(name):
    if name == "ghz8":
        return ghz_state(8), list(range(1, 9))
    if name == "ghz4":
        return ghz_state(4), list(range(1, 5))
    if name == "4p4d":
        return four_p_four_d_state(), list(range(1, 9))
    raise KeyError(f"unknown seed {name!r}")


@dataclass
class Recipe:
    """Seed plus an ordered list of operations on chip labels.

    Operations: ``("h", q)``, ``("gate", matrix, (q, ...))``, ``("cz", u, v)``,
    ``("lc", v)`` and ``("z", v, outcome)``.  ``graph_from`` marks the index
    of the first graph-level operation: the state after the preceding steps
    is the star graph on the seed's labels.
    """

    name: str
    seed: str
    ops: list
    output_order: list
    target: Hypergraph | None = None
    graph_from: int | None = None
    correction: list = field(default_factory=list)

    def _check_local(self, labels):
        photon = {q: (q - 1) // 2 for q in labels}
        for op in self.ops:
            if op[0] == "cz" and photon[op[1]] != photon[op[2]]:
                raise ValueError(f"CZ{op[1]}{op[2]} is not inside one photon")
            if op[0] == "gate" and len({photon[q] for q in op[2]}) != 1:
                raise ValueError("multi-qubit gates must act inside one photon")


def _graph_on(labels, edges_by_label):
    pos = {q: i for i, q in enumerate(labels)}
    return Hypergraph(len(labels), [[pos[q] for q in e] for e in edges_by_label])


def replay(recipe: Recipe):
    """Run a recipe at the state level.

    Returns ``(state, labels)`` with qubits ordered as ``recipe.output_order``.
    Z projections are post-selected on the recipe's outcome; LC steps use
    the current graph to pick their local gates, so graph-level operations
    are only allowed after ``graph_from``.
    """
    state, labels = seed_state(recipe.seed)
    recipe._check_local(labels)
    graph = None
    for i, op in enumerate(recipe.ops):
        if recipe.graph_from is not None and i == recipe.graph_from:
            graph = star(len(labels))
        kind = op[0]
        if kind == "h":
            state = apply_unitary(state, H, [labels.index(op[1])])
        elif kind == "gate":
            state = apply_unitary(state, op[1], [labels.index(q) for q in op[2]])
        elif kind == "cz":
            u, v = labels.index(op[1]), labels.index(op[2])
            state = apply_unitary(state, CZ, [u, v])
            if graph is not None:
                graph = toggle_cz(graph, u, v)
        elif kind == "lc":
            if graph is None:
                raise ValueError("LC step before the graph is known")
            v = labels.index(op[1])
            state = apply_gates(state, lc_unitary(graph, v))
            graph = local_complement(graph, v)
        elif kind == "z":
            v = labels.index(op[1])
            if graph is not None:
                state, graph, byp = z_measure_vertex(state, graph, v, op[2])
                if byp:
                    raise ValueError("recipes only use byproduct-free projections")
            else:
                _, _, state = measure_projective(state, np.eye(2), [v], outcome=op[2])
            labels = labels[:v] + labels[v + 1:]
        else:
            raise ValueError(f"unknown recipe operation {kind!r}")
    for kind, q in recipe.correction:
        state = apply_unitary(state, Z, [labels.index(q)])
    order = [labels.index(q) for q in recipe.output_order]
    return permute_qubits(state, order), list(recipe.output_order)


def replay_graph(recipe: Recipe):
    """Graph-level replay starting at ``graph_from`` (labels -> edges)."""
    if recipe.graph_from is None:
        raise ValueError("recipe has no graph-level part")
    labels = seed_state(recipe.seed)[1]
    graph = star(len(labels))
    for op in recipe.ops[recipe.graph_from:]:
        if op[0] == "cz":
            graph = toggle_cz(graph, labels.index(op[1]), labels.index(op[2]))
        elif op[0] == "lc":
            graph = local_complement(graph, labels.index(op[1]))
        elif op[0] == "z":
            v = labels.index(op[1])
            _, graph, _ = z_measure_vertex(build_state(graph), graph, v, op[2])
            labels = labels[:v] + labels[v + 1:]
    return graph.relabel([labels.index(q) for q in recipe.output_order])


def _star8_prefix():
    return [("h", q) for q in range(2, 9)]


def _qudit_unitaries():
    """Qudit rotations taking the 4P4D state to the eight-qubit hypergraph."""
    def seq(*ops):
        return [("gate", g, t) for g, t in reversed(ops)]

    return (
        seq((H, (1,)), (H, (2,)), (Z, (1,)), (rz(-np.pi / 4), (2,)), (CX, (1, 2)))
        + seq((H, (4,)), (rz(np.pi / 2), (3,)), (rz(-np.pi / 2), (4,)), (CX, (3, 4)))
        + seq((Z, (5,)), (rz(np.pi / 4), (5,)), (rz(np.pi / 2), (6,)), (CX, (5, 6)), (CZ, (5, 6)))
        + seq((H, (7,)), (H, (8,)), (rz(-np.pi / 4), (8,)), (CX, (7, 8)))
    )


def _branched_ops():
    return _star8_prefix() + [("cz", 3, 4), ("lc", 1), ("lc", 3)]


def _l5_ops():
    return _star8_prefix() + [
        ("cz", 3, 4), ("cz", 7, 8), ("lc", 3), ("lc", 7), ("z", 2, 0), ("z", 5, 0), ("z", 6, 0),
    ]


def _z(*labels):
    return [("z", q, 0) for q in labels]


def named_recipes():
    """Recipe for every named state, keyed by name."""
    g7 = 7  # first graph-level step after the seven Hadamards
    clover_ops = _qudit_unitaries() + _z(8, 4, 2)
    rec = {
        "star8": Recipe("star8", "ghz8", _star8_prefix(), list(range(1, 9)), star(8), g7),
        "star4": Recipe("star4", "ghz4", [("h", q) for q in (2, 3, 4)], [1, 2, 3, 4], star(4)),
        "GHZ8": Recipe("GHZ8", "ghz8", [], list(range(1, 9))),
        "L5": Recipe("L5", "ghz8", _l5_ops(), [4, 3, 1, 7, 8], line(5), g7),
        "L4": Recipe("L4", "ghz8", _l5_ops() + _z(8), [4, 3, 1, 7], line(4), g7),
        "L3": Recipe("L3", "ghz8", _l5_ops() + _z(7, 8), [4, 3, 1], line(3), g7),
        "box4": Recipe(
            "box4", "ghz8", _l5_ops() + _z(8) + [("lc", 3), ("lc", 1), ("lc", 4)],
            [4, 1, 3, 7], box4(), g7,
        ),
        "B7": Recipe("B7", "ghz8", _branched_ops() + _z(8), list(range(1, 8)), branched(7), g7),
        "crazy6": Recipe("crazy6", "ghz8", _branched_ops() + _z(8, 7), list(range(1, 7)), branched(6), g7),
        "B5": Recipe("B5", "ghz8", _branched_ops() + _z(8, 7, 6), list(range(1, 6)), branched(5), g7),
        "B3": Recipe("B3", "ghz8", _branched_ops() + _z(8, 7, 6, 5, 2), [1, 3, 4], branched(3), g7),
        "clover": Recipe("clover", "4p4d", clover_ops, [1, 3, 7, 5, 6], clover()),
        "toffoli": Recipe("toffoli", "4p4d", clover_ops + _z(1, 5), [3, 7, 6], toffoli()),
        "fc_toffoli": Recipe(
            "fc_toffoli", "4p4d", clover_ops + [("z", 1, 1), ("z", 3, 1)], [7, 5, 6], fc_toffoli(),
            correction=[("Z", 6)],
        ),
    }
    return rec


def recipe_state(name):
    """State vector of a named state, produced by its recipe."""
    state, _ = replay(named_recipes()[name])
    return state


def check_recipe(recipe: Recipe):
    """Fidelity between the replayed state and the declared target."""
    state, _ = replay(recipe)
    target = ghz_state(8) if recipe.target is None else build_state(recipe.target)
    return fidelity(state, target)


def _embed_photon(gate, slots):
    """4x4 operator for a gate on qubit slots (0 = first qubit of the photon)."""
    from .core.states import I2, SWAP
    gate = np.asarray(gate, dtype=complex)
    if len(slots) == 1:
        return np.kron(gate, I2) if slots[0] == 0 else np.kron(I2, gate)
    if tuple(slots) == (0, 1):
        return gate
    return SWAP @ gate @ SWAP


def photon_program(recipe: Recipe):
    """Per-photon 4x4 unitaries and Z projections equivalent to the recipe.

    Every recipe operation acts inside one photon, so the whole recipe is a
    local unitary per photon followed by computational-basis projections.
    Returns ``(unitaries, projections)``: ``unitaries[p]`` for photons
    p = 0..3 (A..D) and ``projections`` mapping chip label -> outcome.
    """
    if recipe.seed not in ("ghz8", "4p4d"):
        raise ValueError("photon programs need an eight-qubit seed")
    labels = list(range(1, 9))
    unitaries = [np.eye(4, dtype=complex) for _ in range(4)]
    projections = {}
    graph = None

    def add(gate, qs):
        photon = (qs[0] - 1) // 2
        unitaries[photon] = _embed_photon(gate, [(q - 1) % 2 for q in qs]) @ unitaries[photon]

    for i, op in enumerate(recipe.ops):
        if recipe.graph_from is not None and i == recipe.graph_from:
            graph = star(8)
        kind = op[0]
        if kind == "h":
            add(H, [op[1]])
        elif kind == "gate":
            add(op[1], list(op[2]))
        elif kind == "cz":
            add(CZ, [op[1], op[2]])
            if graph is not None:
                graph = toggle_cz(graph, labels.index(op[1]), labels.index(op[2]))
        elif kind == "lc":
            v = labels.index(op[1])
            for g, q in lc_unitary(graph, v):
                add(g, [labels[q]])
            graph = local_complement(graph, v)
        elif kind == "z":
            v = labels.index(op[1])
            if graph is not None:
                from .graphs import delete_vertex
                if op[2] == 1:
                    raise ValueError("photon programs support outcome-0 graph projections only")
                graph = delete_vertex(graph, v)
            projections[op[1]] = op[2]
            labels = labels[:v] + labels[v + 1:]
    for kind, q in recipe.correction:
        add(Z, [q])
    return unitaries, projections
