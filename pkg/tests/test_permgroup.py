import itertools
import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from ssttool.graph import Graph
from ssttool.instances import c8, cycle, disjoint_cliques, random_tp
from ssttool.permgroup import (compose, cycles, from_cycles, graph_automorphisms, identity, inverse,
                               orbit_partition, pointwise_stabilizer, read_generators,
                               schreier_sims, write_generators)


def closure(gens, n):
    seen = {identity(n)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = compose(g, a)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


perms6 = st.permutations(list(range(6))).map(tuple)


@given(st.lists(perms6, max_size=3))
@settings(max_examples=80, deadline=None)
def test_schreier_sims_matches_closure(gens):
    elems = closure(gens, 6)
    grp = schreier_sims(gens, 6)
    assert grp.order() == len(elems)
    assert set(grp.elements()) == elems
    rng = random.Random(len(elems))
    for _ in range(20):
        p = tuple(rng.sample(range(6), 6))
        assert grp.contains(p) == (p in elems)


@given(st.lists(perms6, min_size=1, max_size=3), st.lists(st.integers(0, 5), max_size=3))
@settings(max_examples=60, deadline=None)
def test_pointwise_stabilizer_matches_filter(gens, pts):
    elems = closure(gens, 6)
    stab = pointwise_stabilizer(schreier_sims(gens, 6), pts)
    want = {e for e in elems if all(e[p] == p for p in pts)}
    assert set(stab.elements()) == want


def test_orbits_and_order_of_symmetric_group():
    n = 5
    grp = schreier_sims([from_cycles([(0, 1)], n), from_cycles([tuple(range(n))], n)], n)
    assert grp.order() == math.factorial(n)
    assert grp.orbits() == [list(range(n))]


def test_perm_helpers():
    p = from_cycles([(0, 2, 1)], 4)
    assert p == (2, 0, 1, 3)
    assert compose(p, inverse(p)) == identity(4)
    assert cycles(p) == [(0, 2, 1)]
    with pytest.raises(ValueError):
        from_cycles([(0, 1), (1, 2)], 3)
    with pytest.raises(ValueError):
        from_cycles([(0, 5)], 3)


def test_orbit_partition_union_find():
    assert orbit_partition([from_cycles([(0, 3)], 5), from_cycles([(3, 4)], 5)], 5) == [[0, 3, 4], [1], [2]]


# ------------------------------------------------------------------ automorphisms


def nx_automorphism_count(g):
    h = nx.Graph()
    h.add_nodes_from((v, {"w": g.weights[v]}) for v in range(g.n))
    h.add_edges_from(g.edges())
    gm = GraphMatcher(h, h, node_match=lambda a, b: a["w"] == b["w"])
    return sum(1 for _ in gm.isomorphisms_iter())


def is_automorphism(g, p):
    return all(g.weights[v] == g.weights[p[v]] for v in range(g.n)) and \
        {tuple(sorted((p[u], p[v]))) for u, v in g.edges()} == set(g.edges())


@st.composite
def weighted_graphs(draw):
    n = draw(st.integers(1, 8))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    w = draw(st.lists(st.integers(1, 2), min_size=n, max_size=n))
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k], w)


@given(weighted_graphs())
@settings(max_examples=150, deadline=None)
def test_automorphism_group_order_matches_networkx(g):
    gens = graph_automorphisms(g)
    assert all(is_automorphism(g, p) for p in gens)
    assert schreier_sims(gens, g.n).order() == nx_automorphism_count(g)


@pytest.mark.parametrize("g, order", [
    (c8(), 16),
    (cycle(5), 10),
    (disjoint_cliques(3, 3), 6 ** 3 * 6),
    (Graph.from_edges(6, []), 720),
])
def test_known_group_orders(g, order):
    assert schreier_sims(graph_automorphisms(g), g.n).order() == order


@pytest.mark.parametrize("seed", range(10))
def test_tp_automorphisms_match_networkx(seed):
    g = random_tp(10, random.Random(seed))
    assert schreier_sims(graph_automorphisms(g), g.n).order() == nx_automorphism_count(g)


# ------------------------------------------------------------------ generator files


def test_generator_text_roundtrip_one_based():
    gens = [from_cycles([(0, 7), (1, 6)], 8), identity(8)]
    text = write_generators(gens, base=1)
    assert text == "(1 8)(2 7)\n()\n"
    assert read_generators(text, 8, base=1) == gens


def test_read_generators_image_lists_and_comments():
    assert read_generators("1 0 2  # swap\n\n") == [(1, 0, 2)]
    assert read_generators("(1 2)", base=1) == [(1, 0)]


@pytest.mark.parametrize("text", ["(1 2", "(1 1)", "0 0 1", "a b", "(1 2)(2 3)"])
def test_read_generators_errors(text):
    with pytest.raises(ValueError):
        read_generators(text, 4)


def test_read_generators_degree_mismatch():
    with pytest.raises(ValueError, match="degree"):
        read_generators("1 0 2", 4)


def test_c8_stabilizer_orbits():
    grp = schreier_sims(graph_automorphisms(c8()), 8)
    stab = pointwise_stabilizer(grp, [0])
    assert stab.orbit(2) == [2, 6]
    assert stab.orbits() == [[0], [1, 7], [2, 6], [3, 5], [4]]
