"""Built-in example graphs and seeded instance generators.

Node ids are 0-based; figure node ``k`` is id ``k - 1``.
"""

from __future__ import annotations

import random
from typing import Sequence

from .graph import (Graph, OutForest, components, is_bipartite, is_trivially_perfect,
                    maximal_cliques)
from .permgroup import graph_automorphisms, orbit_partition


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint_cliques(m: int, count: int) -> Graph:
    if m < 1 or count < 1:
        raise ValueError("clique size and count must be positive")
    edges = [(b + i, b + j) for b in range(0, m * count, m) for i in range(m) for j in range(i + 1, m)]
    return Graph.from_edges(m * count, edges)


def c8() -> Graph:
    return cycle(8)


def fig4() -> Graph:
    """Ten-node TP graph: a centre (id 9) joined to everything, plus three
    middle nodes 7, 8, 9 (ids 6, 7, 8) each joined to two of 1..6."""
    centre = 9
    pairs = [(7, 1), (7, 2), (8, 3), (8, 4), (9, 5), (9, 6)]
    edges = [(a - 1, b - 1) for a, b in pairs] + [(centre, v) for v in range(9)]
    return Graph.from_edges(10, edges)


def fig6() -> Graph:
    """Interval graph: triangle on ids 0, 1, 2 with pendants 3 (at 0) and 4 (at 1)."""
    return Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)])


FIG6_LEADER, FIG6_FOLLOWER = 3, 4
# non-stringent leader sequence for fig4 (figure labels 7 then 3)
FIG4_NONSTRINGENT = (6, 2)


def fig7_forest() -> OutForest:
    """Complete binary out-tree on 15 nodes (figure labels 1..15)."""
    return OutForest.from_parents([None] + [(v - 1) // 2 for v in range(1, 15)])


# figure sets {2,3}, {9,10}, {14,15}
FIG7_SETS = ((1, 2), (8, 9), (13, 14))


BUILTINS = {"c8": c8, "fig4": fig4, "fig6": fig6, "fig7": lambda: fig7_forest().comparability_graph()}


# ---------------------------------------------------------------------------
# random generators


def _relabel(n: int, edges: Sequence[tuple[int, int]], rng: random.Random) -> Graph:
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])


def random_tp_forest(n: int, rng: random.Random) -> OutForest:
    """Random out-forest on exactly ``n`` nodes with repeated subtrees.

    Subtrees are copied 1-3 times so the comparability graph usually has
    nontrivial automorphisms.
    """
    if n < 1:
        raise ValueError("n must be positive")
    parent: list[int | None] = []

    def shape(budget: int) -> list[int | None]:
        # parent list of a rooted tree with at most ``budget`` nodes, root 0
        out: list[int | None] = [None]
        while len(out) < budget and rng.random() < 0.75:
            sub = shape(rng.randint(1, budget - len(out)))
            copies = rng.choice((1, 1, 2, 2, 3))
            copies = max(1, min(copies, (budget - len(out)) // len(sub)))
            for _ in range(copies):
                base = len(out)
                out += [0 if p is None else base + p for p in sub]
        return out

    while len(parent) < n:
        sub = shape(n - len(parent))
        copies = max(1, min(rng.choice((1, 2)), (n - len(parent)) // len(sub)))
        for _ in range(copies):
            base = len(parent)
            parent += [None if p is None else base + p for p in sub]
    perm = list(range(n))
    rng.shuffle(perm)
    out: list[int | None] = [None] * n
    for v, p in enumerate(parent):
        out[perm[v]] = None if p is None else perm[p]
    return OutForest.from_parents(out)


def random_tp(n: int, rng: random.Random) -> Graph:
    return random_tp_forest(n, rng).comparability_graph()


def random_bipartite(n: int, rng: random.Random, p: float = 0.3, twins: int | None = None) -> Graph:
    """Connected bipartite graph; ``twins`` extra nodes copy a neighbourhood."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if twins is None:
        twins = rng.randint(0, max(0, (n - 2) // 3))
    base = max(2, n - twins)
    side = [0, 1] + [rng.randint(0, 1) for _ in range(base - 2)]
    edges = {(0, 1)}
    for v in range(2, base):
        other = [u for u in range(v) if side[u] != side[v]]
        edges.add((rng.choice(other), v))
    for u in range(base):
        for v in range(u + 1, base):
            if side[u] != side[v] and rng.random() < p:
                edges.add((u, v))
    nbrs = {v: set() for v in range(base)}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    for t in range(base, n):
        src = rng.randrange(t)
        nbrs[t] = set(nbrs[src])
        for u in nbrs[t]:
            nbrs[u].add(t)
            edges.add((min(u, t), max(u, t)))
    return _relabel(n, sorted(edges), rng)


def random_3dm(k: int, size: int, rng: random.Random) -> list[tuple[int, int, int]]:
    """``size`` distinct triples over ``range(k)`` for each coordinate."""
    pool = [(a, b, c) for a in range(k) for b in range(k) for c in range(k)]
    if size > len(pool):
        raise ValueError(f"at most {len(pool)} distinct triples exist for k={k}")
    return sorted(rng.sample(pool, size))


def orbit_weights(g: Graph, rng: random.Random, classes: int = 3, split: float = 0.3) -> Graph:
    """Weights constant on automorphism orbits, except that an orbit is
    split into per-node random weights with probability ``split``."""
    w = [1] * g.n
    for orb in orbit_partition(graph_automorphisms(g), g.n):
        if len(orb) > 1 and rng.random() < split:
            for v in orb:
                w[v] = rng.randint(1, classes)
        else:
            c = rng.randint(1, classes)
            for v in orb:
                w[v] = c
    return g.with_weights(w)


# ---------------------------------------------------------------------------
# manifests


def manifest(g: Graph, kind: str, params: dict) -> dict:
    return {
        "kind": kind,
        "params": params,
        "n": g.n,
        "m": g.m,
        "trivially_perfect": is_trivially_perfect(g),
        "bipartite": is_bipartite(g) is not None,
        "components": len(components(g)),
        "maximal_cliques": len(maximal_cliques(g)),
    }


def expected_properties(kind: str, params: dict) -> dict:
    """Properties a generated instance of ``kind`` must have."""
    if kind == "tp":
        return {"n": params["n"], "trivially_perfect": True}
    if kind == "bipartite":
        return {"n": params["n"], "bipartite": True, "components": 1}
    if kind == "cycle":
        return {"n": params["n"], "m": params["n"]}
    if kind == "disjoint-cliques":
        m, count = params["m"], params["count"]
        return {"n": m * count, "components": count, "maximal_cliques": count,
                "m": count * m * (m - 1) // 2, "trivially_perfect": True}
    return {}


def check_manifest(man: dict) -> list[str]:
    """Mismatches between a manifest and its kind's expected properties."""
    exp = expected_properties(man["kind"], man["params"])
    return [f"{k}: expected {v}, got {man[k]}" for k, v in exp.items() if man[k] != v]
