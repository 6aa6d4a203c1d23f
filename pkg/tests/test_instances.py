import itertools
import random

import networkx as nx
import pytest

from ssttool import instances as inst
from ssttool import verify
from ssttool.graph import Graph, components, is_bipartite, is_trivially_perfect
from ssttool.permgroup import graph_automorphisms, orbit_partition


def test_builtins():
    assert inst.c8().edges() == [(0, 1), (0, 7), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
    g = inst.fig4()
    assert g.n == 10 and g.degree(9) == 9 and is_trivially_perfect(g)
    assert inst.fig6().m == 5
    f = inst.fig7_forest()
    assert f.n == 15 and f.children[0] == (1, 2) and f.children[6] == (13, 14)
    assert set(inst.BUILTINS) == {"c8", "fig4", "fig6", "fig7"}


def test_fig4_orbits():
    g = inst.fig4()
    orbits = orbit_partition(graph_automorphisms(g), g.n)
    assert sorted(map(tuple, orbits)) == [(0, 1, 2, 3, 4, 5), (6, 7, 8), (9,)]


@pytest.mark.parametrize("seed", range(20))
def test_random_tp_properties(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 30)
    g = inst.random_tp(n, rng)
    assert g.n == n and is_trivially_perfect(g)


@pytest.mark.parametrize("seed", range(20))
def test_random_bipartite_properties(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 25)
    g = inst.random_bipartite(n, rng)
    assert g.n == n and is_bipartite(g) is not None and len(components(g)) == 1


def test_generators_are_seeded():
    a = inst.random_tp(20, random.Random(4))
    b = inst.random_tp(20, random.Random(4))
    assert a == b


def test_orbit_weights_are_invariant_when_unsplit():
    rng = random.Random(0)
    g = inst.orbit_weights(inst.random_tp(15, rng), rng, classes=3, split=0.0)
    gens = graph_automorphisms(g.with_weights([1] * g.n))
    assert all(g.weights[p[v]] == g.weights[v] for p in gens for v in range(g.n))


def test_random_3dm():
    t = inst.random_3dm(2, 5, random.Random(1))
    assert len(set(t)) == 5 and all(0 <= a < 2 for x in t for a in x)
    with pytest.raises(ValueError):
        inst.random_3dm(1, 2, random.Random(1))


def test_generator_argument_errors():
    with pytest.raises(ValueError):
        inst.cycle(2)
    with pytest.raises(ValueError):
        inst.disjoint_cliques(0, 2)
    with pytest.raises(ValueError):
        inst.random_tp_forest(0, random.Random())
    with pytest.raises(ValueError):
        inst.random_bipartite(1, random.Random())


def test_manifest_checks():
    g = inst.disjoint_cliques(3, 2)
    man = inst.manifest(g, "disjoint-cliques", {"m": 3, "count": 2})
    assert man["maximal_cliques"] == 2 and inst.check_manifest(man) == []
    man["components"] = 5
    assert inst.check_manifest(man) == ["components: expected 2, got 5"]


# ------------------------------------------------------------------ verify helpers


def test_induced_paths_on_a_cycle():
    g = inst.cycle(6)
    paths = verify.induced_paths(g, 0, 3)
    assert sorted(map(tuple, paths)) == [(0, 1, 2, 3), (0, 5, 4, 3)]


def test_chordless_odd_cycles():
    g = inst.cycle(5)
    assert [sorted(c) for c in verify.chordless_odd_cycles(g)] == [[0, 1, 2, 3, 4]]
    assert verify.chordless_odd_cycles(inst.cycle(6)) == []


def random_graph(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.4])


@pytest.mark.parametrize("seed", range(40))
def test_chordless_odd_cycles_match_subset_oracle(seed):
    g = random_graph(seed)
    want = set()
    for k in range(3, g.n + 1, 2):
        for s in itertools.combinations(range(g.n), k):
            sub, _ = g.induced_subgraph(s)
            if all(sub.degree(v) == 2 for v in range(k)) and len(components(sub)) == 1:
                want.add(s)
    got = [tuple(sorted(c)) for c in verify.chordless_odd_cycles(g)]
    assert len(got) == len(set(got)) and set(got) == want


@pytest.mark.parametrize("seed", range(40))
def test_induced_paths_match_networkx_filter(seed):
    g = random_graph(seed)
    h = nx.Graph(g.edges())
    h.add_nodes_from(range(g.n))
    s, t = 0, g.n - 1
    want = sorted(tuple(p) for p in nx.all_simple_paths(h, s, t)
                  if g.induced_subgraph(p)[0].m == len(p) - 1)
    assert sorted(map(tuple, verify.induced_paths(g, s, t))) == want


def test_has_matching():
    assert verify.has_matching(2, [(0, 0, 0), (1, 1, 1)])
    assert not verify.has_matching(2, [(0, 0, 0), (1, 0, 1)])


@pytest.mark.parametrize("suite, kw", [
    ("presolve", {}),
    ("network", {"count": 10}),
    ("bipartite-hull", {"count": 3}),
    ("extended", {"count": 3}),
    ("canonical", {"count": 10}),
    ("reduction", {"count": 5}),
    ("facet", {"count": 3}),
])
def test_small_suites_pass(suite, kw):
    rep = verify.SUITES[suite](seed=1, **kw)
    assert rep.passed, rep.text(verbose=True)
    assert rep.text().startswith(f"suite {suite} seed 1:")


def test_suite_report_lists_failures():
    rep = verify.SuiteReport("x", 0)
    rep.add("good", True)
    rep.add("bad", False, "why")
    assert not rep.passed and [c.name for c in rep.failures] == ["bad"]
    assert rep.text() == "suite x seed 0: 1/2 passed\n  FAIL bad: why"
