"""Graph states reachable with the device operations, grouped into LC classes.

States during the search are labelled graphs on the seed's vertices with a
mask of vertices still present (Z-deleted vertices are gone).  Edges are a
bitmask over vertex pairs so the moves are cheap integer operations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core.states import CZ, apply_unitary, fidelity, measure_projective
from .graphs import Hypergraph, apply_gates, build_state, delete_vertex, lc_unitary, local_complement, star

DEVICE_PAIRS = ((0, 1), (2, 3), (4, 5), (6, 7))
MAX_VERTICES = 8


@lru_cache(maxsize=None)
def _perms(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def _pair_bit(a, b):
    lo, hi = min(a, b), max(a, b)
    return hi * (hi - 1) // 2 + lo


@lru_cache(maxsize=200_000)
def _canon(n, edges):
    if not edges:
        return (n, 0)
    p = _perms(n)
    e = np.array(edges, dtype=np.int64)
    a, b = p[:, e[:, 0]], p[:, e[:, 1]]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    codes = np.left_shift(1, hi * (hi - 1) // 2 + lo).sum(axis=1)
    return (n, int(codes.min()))


def canonical_form(g: Hypergraph):
    """Label (n, code) equal for two graphs iff they are isomorphic.

    ``code`` is the smallest edge bitmask over all vertex relabellings.
    """
    if not g.is_graph:
        raise ValueError("canonical_form needs a graph")
    if g.n > MAX_VERTICES:
        raise ValueError(f"at most {MAX_VERTICES} vertices")
    return _canon(g.n, tuple(sorted(g.edges)))


def graph_from_label(label):
    n, code = label
    edges = [(a, b) for b in range(n) for a in range(b) if code >> _pair_bit(a, b) & 1]
    return Hypergraph(n, edges)


_CLASS = {}


def lc_orbit(g: Hypergraph):
    """Canonical labels of every graph LC-equivalent to ``g`` up to isomorphism."""
    start = canonical_form(g)
    orbit, stack = {start}, [start]
    while stack:
        h = graph_from_label(stack.pop())
        for v in range(h.n):
            lab = canonical_form(local_complement(h, v))
            if lab not in orbit:
                orbit.add(lab)
                stack.append(lab)
    return orbit


def lc_class_id(g: Hypergraph):
    """Smallest canonical label in the LC orbit of ``g``."""
    lab = canonical_form(g)
    if lab not in _CLASS:
        orbit = lc_orbit(g)
        cid = min(orbit)
        for o in orbit:
            _CLASS[o] = cid
    return _CLASS[lab]


def class_key(cid):
    return f"{cid[0]}:{cid[1]:x}"


# search state -------------------------------------------------------------------

@dataclass(frozen=True)
class DeviceRuleset:
    seeds: tuple = (star(8),)
    cz_pairs: tuple = DEVICE_PAIRS
    allow_lc: bool = True
    allow_delete: bool = True

    def __post_init__(self):
        n = {s.n for s in self.seeds}
        if len(n) != 1:
            raise ValueError("all seeds need the same vertex count")
        if n.pop() > MAX_VERTICES:
            raise ValueError(f"at most {MAX_VERTICES} vertices")
        for a, b in self.cz_pairs:
            if b != a + 1 or a % 2:
                raise ValueError(f"CZ pair {(a, b)} is not an intra-qudit pair")

    @property
    def n(self):
        return self.seeds[0].n


def qubit_baseline():
    """Four photons, no intra-qudit gates: post-selected GHZ4 and L4 seeds."""
    return DeviceRuleset(seeds=(star(4), Hypergraph(4, [(0, 1), (1, 2), (2, 3)])), cz_pairs=())


def _encode(g: Hypergraph):
    e = 0
    for a, b in g.edges:
        e |= 1 << _pair_bit(a, b)
    return e, (1 << g.n) - 1


def _moves(rules, n, state):
    e, alive = state
    out = []
    verts = [v for v in range(n) if alive >> v & 1]
    for v in verts:
        if rules.allow_lc:
            nb = [u for u in verts if u != v and e >> _pair_bit(u, v) & 1]
            f = e
            for a, b in itertools.combinations(nb, 2):
                f ^= 1 << _pair_bit(a, b)
            out.append((("LC", v), (f, alive)))
        if rules.allow_delete and len(verts) > 1:
            f = e
            for u in range(n):
                if u != v:
                    f &= ~(1 << _pair_bit(u, v))
            out.append((("Z", v), (f, alive & ~(1 << v))))
    for a, b in rules.cz_pairs:
        if alive >> a & 1 and alive >> b & 1:
            out.append((("CZ", a, b), (e ^ 1 << _pair_bit(a, b), alive)))
    return out


def _components(n, state):
    e, alive = state
    left = {v for v in range(n) if alive >> v & 1}
    comps = []
    while left:
        s = left.pop()
        comp, stack = {s}, [s]
        while stack:
            x = stack.pop()
            for u in list(left):
                if e >> _pair_bit(u, x) & 1:
                    left.discard(u)
                    comp.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def _subgraph(state, verts):
    e, _ = state
    pos = {v: i for i, v in enumerate(verts)}
    return len(verts), tuple(sorted((pos[a], pos[b]) for a, b in itertools.combinations(verts, 2)
                                    if e >> _pair_bit(a, b) & 1))


def counted_graphs(n, state, convention="connected", min_vertices=2):
    """Canonical labels this state contributes under the counting convention.

    "connected": the whole remaining graph, if connected.  "components":
    every connected component.  Either way only graphs with at least
    ``min_vertices`` vertices count.
    """
    comps = _components(n, state)
    if convention == "connected":
        comps = comps if len(comps) == 1 else []
    elif convention != "components":
        raise ValueError(f"unknown convention {convention!r}")
    return [_canon(*_subgraph(state, c)) for c in comps if len(c) >= min_vertices]


@dataclass
class ExploreResult:
    classes: dict = field(default_factory=dict)   # class id -> {"recipe", "seed", "graphs"}
    graphs: set = field(default_factory=set)
    steps: int = 0
    saturated: bool = False

    @property
    def class_count(self):
        return len(self.classes)

    @property
    def graph_count(self):
        return len(self.graphs)

    def to_json(self):
        out = {}
        for cid in sorted(self.classes):
            c = self.classes[cid]
            rep = graph_from_label(cid)
            out[class_key(cid)] = {
                "representative": [[a + 1, b + 1] for a, b in sorted(rep.edges)],
                "n": rep.n,
                "members": len(c["graphs"]),
                "seed": c["seed"],
                "recipe": [list(op) for op in c["recipe"]],
            }
        return {"classes": len(self.classes), "graphs": len(self.graphs),
                "steps": self.steps, "saturated": self.saturated, "per_class": out}


def _record(res, rules, seed_idx, state, recipe, convention, min_vertices):
    for lab in counted_graphs(rules.n, state, convention, min_vertices):
        res.graphs.add(lab)
        cid = lc_class_id(graph_from_label(lab))
        entry = res.classes.get(cid)
        if entry is None:
            res.classes[cid] = entry = {"recipe": tuple(recipe), "seed": seed_idx, "graphs": set()}
        elif len(recipe) < len(entry["recipe"]):
            entry["recipe"], entry["seed"] = tuple(recipe), seed_idx
        entry["graphs"].add(lab)


def explore(rules: DeviceRuleset | None = None, budget=1_000_000, seed=42, convention="connected",
            min_vertices=2, walk_length=12, window=100_000):
    """Random walks over the ruleset, recording LC classes.

    Each walk starts from a uniformly chosen state reached so far (initially
    the seeds) and applies a random number, at most ``walk_length``, of
    random moves; the move kind is chosen uniformly first so deletions do not
    dominate.  ``budget`` is the total move count.  The search stops early
    after ``window`` moves with no new class and no new graph.  Per class the
    shortest recipe found is kept; graph counts are over reached graphs.
    """
    rules = rules or DeviceRuleset()
    if budget < 0:
        raise ValueError("budget must be non-negative")
    rng = np.random.default_rng(seed)
    res = ExploreResult()
    reached, order = {}, []
    for i, s in enumerate(rules.seeds):
        st = _encode(s)
        if st not in reached:
            reached[st] = (i, ())
            order.append(st)
        _record(res, rules, i, st, [], convention, min_vertices)
    since_new = 0
    while res.steps < budget and since_new < window:
        state = order[int(rng.integers(len(order)))]
        i, recipe = reached[state]
        for _ in range(int(rng.integers(1, walk_length + 1))):
            if res.steps >= budget:
                break
            moves = _moves(rules, rules.n, state)
            if not moves:
                break
            kinds = sorted({m[0][0] for m in moves})
            kind = kinds[int(rng.integers(len(kinds)))]
            pool = [m for m in moves if m[0][0] == kind]
            op, state = pool[int(rng.integers(len(pool)))]
            recipe = recipe + (op,)
            res.steps += 1
            if state not in reached:
                reached[state] = (i, recipe)
                order.append(state)
            elif len(recipe) < len(reached[state][1]):
                reached[state] = (i, recipe)
            before = (len(res.classes), len(res.graphs))
            _record(res, rules, i, state, recipe, convention, min_vertices)
            since_new = 0 if (len(res.classes), len(res.graphs)) != before else since_new + 1
    res.saturated = since_new >= window
    return res


def exhaustive(rules: DeviceRuleset | None = None, convention="connected", min_vertices=2):
    """Breadth-first closure of the ruleset; recipes are shortest possible."""
    rules = rules or DeviceRuleset()
    res = ExploreResult(saturated=True)
    frontier = []
    seen = {}
    for i, s in enumerate(rules.seeds):
        st = _encode(s)
        if st not in seen:
            seen[st] = (i, ())
            frontier.append(st)
    while frontier:
        nxt = []
        for st in frontier:
            i, recipe = seen[st]
            _record(res, rules, i, st, recipe, convention, min_vertices)
            for op, new in _moves(rules, rules.n, st):
                if new not in seen:
                    seen[new] = (i, recipe + (op,))
                    nxt.append(new)
        frontier = nxt
    res.steps = len(seen)
    return res


# replay -------------------------------------------------------------------------

def replay_recipe(seed: Hypergraph, recipe):
    """Apply a recipe to the seed state.

    Returns ``(state, graph, remaining)``: deleted vertices are Z-measured
    with outcome 0 and leave the register, so qubit k of ``state`` and vertex
    k of ``graph`` are seed vertex ``remaining[k]``.
    """
    state = build_state(seed)
    g = seed
    alive = list(range(seed.n))
    for op in recipe:
        kind = op[0]
        if kind == "LC":
            v = alive.index(op[1])
            state = apply_gates(state, lc_unitary(g, v))
            g = local_complement(g, v)
        elif kind == "CZ":
            a, b = alive.index(op[1]), alive.index(op[2])
            state = apply_unitary(state, CZ, [a, b])
            g = Hypergraph(g.n, set(g.edges) ^ {tuple(sorted((a, b)))})
        elif kind == "Z":
            v = alive.index(op[1])
            _, _, state = measure_projective(state, np.eye(2), [v], outcome=0)
            g = delete_vertex(g, v)
            alive.remove(op[1])
        else:
            raise ValueError(f"unknown operation {op!r}")
    return state, g, alive


def replay_fidelity(seed: Hypergraph, recipe):
    """Fidelity of the replayed state with build_state of the tracked graph."""
    state, g, _ = replay_recipe(seed, recipe)
    return fidelity(state, build_state(g))


def replay_graph(seed: Hypergraph, recipe):
    """Graph reached by a recipe, computed with the search's bitmask moves."""
    st = _encode(seed)
    rules = DeviceRuleset(seeds=(seed,), cz_pairs=tuple(p for p in DEVICE_PAIRS if p[1] < seed.n))
    for op in recipe:
        nxt = dict(_moves(rules, seed.n, st))
        if tuple(op) not in nxt:
            raise ValueError(f"operation {op!r} not allowed here")
        st = nxt[tuple(op)]
    verts = [v for v in range(seed.n) if st[1] >> v & 1]
    return Hypergraph(*_subgraph(st, verts))
