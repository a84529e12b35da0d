import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qudit_graphs.explorer import (
    DeviceRuleset, canonical_form, class_key, counted_graphs, exhaustive, explore, graph_from_label,
    lc_class_id, lc_orbit, qubit_baseline, replay_fidelity, replay_graph, replay_recipe,
)
from qudit_graphs.graphs import Hypergraph, branched, crazy6, line, local_complement, star

SMALL = DeviceRuleset(seeds=(star(6),), cz_pairs=((0, 1), (2, 3), (4, 5)))


@st.composite
def graphs(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Hypergraph(n, [p for p, m in zip(pairs, mask) if m])


def _isomorphic(g, h):
    # brute-force oracle on edge sets
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    target = {tuple(sorted(e)) for e in h.edges}
    for p in itertools.permutations(range(g.n)):
        if {tuple(sorted((p[a], p[b]))) for a, b in g.edges} == target:
            return True
    return False


def _connected(g):
    adj = {v: set() for v in range(g.n)}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        for u in adj[stack.pop()] - seen:
            seen.add(u)
            stack.append(u)
    return len(seen) == g.n


# canonical forms ----------------------------------------------------------------

@given(graphs(max_n=5), st.data())
def test_canonical_form_relabel_invariant(g, data):
    p = data.draw(st.permutations(range(g.n)))
    h = Hypergraph(g.n, [(p[a], p[b]) for a, b in g.edges])
    assert canonical_form(g) == canonical_form(h)


@given(graphs(max_n=5), graphs(max_n=5))
def test_canonical_form_matches_brute_force(g, h):
    assert (canonical_form(g) == canonical_form(h)) == _isomorphic(g, h)


@given(graphs())
def test_label_round_trip(g):
    assert canonical_form(graph_from_label(canonical_form(g))) == canonical_form(g)


def test_hypergraph_rejected():
    with pytest.raises(ValueError):
        canonical_form(Hypergraph(3, [(0, 1, 2)]))


@pytest.mark.parametrize("n,graphs_count,classes", [(2, 1, 1), (3, 2, 1), (4, 6, 2), (5, 21, 4), (6, 112, 11)])
def test_connected_graph_and_class_counts(n, graphs_count, classes):
    # known enumerations of connected graphs and their LC classes up to isomorphism
    labels, cls = set(), set()
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        g = Hypergraph(n, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if _connected(g):
            labels.add(canonical_form(g))
            cls.add(lc_class_id(g))
    assert len(labels) == graphs_count and len(cls) == classes


# LC classes -------------------------------------------------------------------

@given(graphs(), st.data())
@settings(max_examples=100)
def test_lc_class_invariant(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    assert lc_class_id(local_complement(g, v)) == lc_class_id(g)


def test_star_and_complete_share_class():
    from qudit_graphs.graphs import complete
    assert lc_class_id(star(5)) == lc_class_id(complete(5))
    assert lc_class_id(star(4)) != lc_class_id(line(4))


def test_crazy6_is_lc_equivalent_to_branched6():
    assert lc_class_id(crazy6()) == lc_class_id(branched(6))


def test_orbit_contains_start():
    assert canonical_form(line(4)) in lc_orbit(line(4))
    assert class_key((4, 11)) == "4:b"


# search --------------------------------------------------------------------------

def test_budget_zero():
    r = explore(budget=0)
    assert r.class_count == 1 and r.graph_count == 1
    assert list(r.classes) == [lc_class_id(star(8))]


def test_explore_deterministic():
    a = explore(SMALL, budget=3000, seed=5).to_json()
    b = explore(SMALL, budget=3000, seed=5).to_json()
    assert a == b


def test_class_count_monotone_in_budget():
    counts = [explore(SMALL, budget=b, seed=9).class_count for b in (0, 10, 100, 1000, 5000)]
    assert counts == sorted(counts)


def test_random_search_reaches_exhaustive_closure():
    full = exhaustive(SMALL)
    r = explore(SMALL, budget=200_000, seed=1, window=20_000)
    assert set(r.classes) == set(full.classes) and r.graphs == full.graphs


def test_explore_rejects_negative_budget():
    with pytest.raises(ValueError):
        explore(budget=-1)


def test_ruleset_validation():
    with pytest.raises(ValueError):
        DeviceRuleset(cz_pairs=((1, 2),))
    with pytest.raises(ValueError):
        DeviceRuleset(seeds=(star(3), star(4)))


def test_counting_conventions():
    # two disjoint edges on four vertices
    g = Hypergraph(4, [(0, 1), (2, 3)])
    state = (sum(1 << (b * (b - 1) // 2 + a) for a, b in g.edges), 0b1111)
    assert counted_graphs(4, state) == []
    assert counted_graphs(4, state, "components") == [canonical_form(Hypergraph(2, [(0, 1)]))] * 2
    with pytest.raises(ValueError):
        counted_graphs(4, state, "any")


def test_qubit_baseline_closure():
    r = exhaustive(qubit_baseline())
    assert r.class_count == 4
    # Bell 1, GHZ3 2, GHZ4 2 and the line class 4
    assert r.graph_count == 9


def test_exhaustive_small_recipes_replay():
    full = exhaustive(SMALL)
    seed = SMALL.seeds[0]
    for cid, c in full.classes.items():
        assert replay_fidelity(seed, c["recipe"]) == pytest.approx(1, abs=1e-9)
        _, g, _ = replay_recipe(seed, c["recipe"])
        assert lc_class_id(g) == cid
        assert canonical_form(replay_graph(seed, c["recipe"])) == canonical_form(g)


def test_to_json_is_serialisable():
    doc = explore(SMALL, budget=500, seed=2).to_json()
    json.dumps(doc)
    for entry in doc["per_class"].values():
        assert all(min(e) >= 1 for e in entry["representative"])


def test_replay_rejects_unknown_op():
    with pytest.raises(ValueError):
        replay_recipe(star(4), [("SWAP", 0, 1)])
    with pytest.raises(ValueError):
        replay_graph(star(4), [("CZ", 1, 2)])
