"""Undirected weighted graphs, DIMACS I/O, recognition routines and clique tools."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class DimacsError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1`` with integer node weights."""

    n: int
    adj: tuple[frozenset[int], ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n or len(self.weights) != self.n:
            raise ValueError("adjacency/weights length must equal n")
        for u, nb in enumerate(self.adj):
            if u in nb:
                raise ValueError(f"self-loop at node {u}")
            for v in nb:
                if not 0 <= v < self.n or u not in self.adj[v]:
                    raise ValueError(f"adjacency not symmetric at {{{u},{v}}}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   weights: Sequence[int] | None = None) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {{{u},{v}}} out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        w = tuple(int(x) for x in weights) if weights is not None else (1,) * n
        return cls(n, tuple(frozenset(s) for s in nbrs), w)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def with_weights(self, weights: Sequence[int]) -> "Graph":
        return Graph(self.n, self.adj, tuple(int(x) for x in weights))

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "Graph":
        return Graph.from_edges(self.n, self.edges() + list(extra), self.weights)

    def isolate(self, nodes: Iterable[int]) -> "Graph":
        """Same node set with every edge at ``nodes`` removed."""
        gone = set(nodes)
        return Graph.from_edges(self.n, [(u, v) for u, v in self.edges()
                                         if u not in gone and v not in gone], self.weights)

    def induced_subgraph(self, nodes: Sequence[int]) -> tuple["Graph", list[int]]:
        """Subgraph on ``nodes`` relabelled ``0..k-1``; also returns the old ids."""
        order = sorted(set(nodes))
        pos = {v: i for i, v in enumerate(order)}
        edges = [(pos[u], pos[v]) for u in order for v in self.adj[u] if v in pos and u < v]
        return Graph.from_edges(len(order), edges, [self.weights[v] for v in order]), order

    def is_stable(self, nodes: Iterable[int]) -> bool:
        s = set(nodes)
        return all(not (self.adj[v] & s) for v in s)

    def is_clique(self, nodes: Iterable[int]) -> bool:
        s = sorted(set(nodes))
        return all(s[j] in self.adj[s[i]] for i in range(len(s)) for j in range(i + 1, len(s)))

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for v in range(self.n):
            indptr[v + 1] = indptr[v] + len(self.adj[v])
        indices = np.fromiter((u for v in range(self.n) for u in sorted(self.adj[v])),
                              dtype=np.int64, count=int(indptr[-1]))
        return indptr, indices


# ---------------------------------------------------------------------------
# I/O


def parse_dimacs(text: str) -> Graph:
    n = None
    edges = []
    weights: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        tok = line.split()
        if tok[0] == "p":
            if n is not None:
                raise DimacsError(lineno, "duplicate problem line")
            if len(tok) < 3:
                raise DimacsError(lineno, "malformed problem line")
            try:
                n = int(tok[2])
            except ValueError:
                raise DimacsError(lineno, "non-integer node count") from None
            continue
        if tok[0] not in ("e", "n"):
            raise DimacsError(lineno, f"unknown line type {tok[0]!r}")
        if n is None:
            raise DimacsError(lineno, "missing 'p' line before data")
        try:
            a, b = int(tok[1]), int(tok[2])
        except (IndexError, ValueError):
            raise DimacsError(lineno, "expected two integers") from None
        if tok[0] == "n":
            if not 1 <= a <= n:
                raise DimacsError(lineno, f"node {a} out of range 1..{n}")
            weights[a - 1] = b
            continue
        for x in (a, b):
            if not 1 <= x <= n:
                raise DimacsError(lineno, f"endpoint {x} out of range 1..{n}")
        if a == b:
            raise DimacsError(lineno, f"self-loop at node {a}")
        edges.append((a - 1, b - 1))
    if n is None:
        raise DimacsError(0, "missing 'p' line")
    w = [weights.get(v, 1) for v in range(n)]
    return Graph.from_edges(n, edges, w)


def emit_dimacs(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"c {c}" for c in comment.splitlines())
    lines.append(f"p edge {g.n} {g.m}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_weights(text: str, n: int) -> list[int]:
    """Sidecar lines ``w <node> <int>`` with 1-based nodes; missing nodes weigh 1."""
    w = [1] * n
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        tok = line.split()
        if tok[0] != "w" or len(tok) != 3:
            raise DimacsError(lineno, "expected 'w <node> <weight>'")
        try:
            v, x = int(tok[1]), int(tok[2])
        except ValueError:
            raise DimacsError(lineno, "expected integers") from None
        if not 1 <= v <= n:
            raise DimacsError(lineno, f"node {v} out of range 1..{n}")
        w[v - 1] = x
    return w


def emit_weights(g: Graph) -> str:
    return "".join(f"w {v + 1} {x}\n" for v, x in enumerate(g.weights))


# ---------------------------------------------------------------------------
# basic transforms and recognition


def complement(g: Graph) -> Graph:
    full = frozenset(range(g.n))
    return Graph(g.n, tuple(full - a - {v} for v, a in enumerate(g.adj)), g.weights)


def components(g: Graph, nodes: Iterable[int] | None = None) -> list[list[int]]:
    """Connected components of ``g[nodes]``, each sorted, ordered by smallest id."""
    pool = set(range(g.n)) if nodes is None else set(nodes)
    out = []
    for s in sorted(pool):
        if s not in pool:
            continue
        comp = [s]
        pool.discard(s)
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.adj[u]:
                if v in pool:
                    pool.discard(v)
                    comp.append(v)
                    queue.append(v)
        out.append(sorted(comp))
    return out


def is_bipartite(g: Graph) -> tuple[frozenset[int], frozenset[int]] | None:
    """2-colouring ``(R, B)`` with each component's smallest node in ``R``."""
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.adj[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    red = frozenset(v for v in range(g.n) if color[v] == 0)
    return red, frozenset(range(g.n)) - red


@dataclass(frozen=True)
class OutForest:
    """Rooted forest; ``parent[v]`` is ``None`` for roots, children sorted by id."""

    parent: tuple[int | None, ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def roots(self) -> list[int]:
        return [v for v, p in enumerate(self.parent) if p is None]

    @classmethod
    def from_parents(cls, parent: Sequence[int | None]) -> "OutForest":
        kids: list[list[int]] = [[] for _ in parent]
        for v, p in enumerate(parent):
            if p is not None:
                kids[p].append(v)
        f = cls(tuple(parent), tuple(tuple(sorted(k)) for k in kids))
        f.preorder()  # rejects cycles
        return f

    def preorder(self) -> list[int]:
        out = []
        stack = list(reversed(self.roots))
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        if len(out) != self.n:
            raise ValueError("parent array contains a cycle")
        return out

    def ancestors(self, v: int) -> list[int]:
        """Proper ancestors of ``v``, nearest first."""
        out = []
        p = self.parent[v]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out

    def precedes(self, u: int, v: int) -> bool:
        """True iff ``u`` is a proper ancestor of ``v``."""
        p = self.parent[v]
        while p is not None:
            if p == u:
                return True
            p = self.parent[p]
        return False

    def root_leaf_paths(self) -> list[list[int]]:
        paths = []
        for v in self.preorder():
            if not self.children[v]:
                paths.append(list(reversed(self.ancestors(v))) + [v])
        return paths

    def comparability_graph(self) -> Graph:
        return Graph.from_edges(self.n, [(a, v) for v in range(self.n) for a in self.ancestors(v)])

    def intervals(self) -> list[tuple[int, int]]:
        """Pairwise distinct laminar intervals: nested iff ancestor/descendant."""
        tin = [0] * self.n
        tout = [0] * self.n
        clock = 0
        for r in self.roots:
            stack = [(r, False)]
            while stack:
                v, done = stack.pop()
                if done:
                    tout[v] = clock
                    clock += 1
                    continue
                tin[v] = clock
                clock += 1
                stack.append((v, True))
                stack.extend((c, False) for c in reversed(self.children[v]))
        return list(zip(tin, tout))


def _peel(g: Graph) -> list[int | None] | None:
    """Parent array from recursive universal-vertex peeling, or None if not TP."""
    parent: list[int | None] = [None] * g.n
    work = [(comp, None) for comp in components(g)]
    while work:
        comp, above = work.pop()
        cs = set(comp)
        univ = [v for v in comp if len(g.adj[v] & cs) == len(comp) - 1]
        if not univ:
            return None
        prev = above
        for u in univ:
            parent[u] = prev
            prev = u
        rest = cs - set(univ)
        for sub in components(g, rest):
            work.append((sub, prev))
    return parent


def is_trivially_perfect(g: Graph) -> bool:
    return _peel(g) is not None


def laminar_model(g: Graph) -> list[tuple[int, int]] | None:
    """Laminar interval model certificate (closed intervals), or None if not TP."""
    parent = _peel(g)
    if parent is None:
        return None
    return OutForest.from_parents(parent).intervals()


def out_forest(g: Graph) -> OutForest:
    parent = _peel(g)
    if parent is None:
        raise ValueError("graph is not trivially perfect")
    return OutForest.from_parents(parent)


def one_chains(f: OutForest) -> list[list[int]]:
    """Maximal 1-chains, in preorder of their first node."""
    chains = []
    for v in f.preorder():
        p = f.parent[v]
        if p is not None and len(f.children[p]) == 1:
            continue
        chain = [v]
        while len(f.children[chain[-1]]) == 1:
            chain.append(f.children[chain[-1]][0])
        chains.append(chain)
    return chains


# ---------------------------------------------------------------------------
# cliques and stable sets


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """All maximal cliques (Bron–Kerbosch with pivoting), sorted."""
    nb = [sum(1 << u for u in g.adj[v]) for v in range(g.n)]
    out: list[tuple[int, ...]] = []

    def bits(x: int) -> list[int]:
        res = []
        while x:
            low = x & -x
            res.append(low.bit_length() - 1)
            x ^= low
        return res

    def expand(r: list[int], p: int, x: int) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(bits(p | x), key=lambda u: (nb[u] & p).bit_count())
        for v in bits(p & ~nb[pivot]):
            expand(r + [v], p & nb[v], x & nb[v])
            p &= ~(1 << v)
            x |= 1 << v

    if g.n:
        expand([], (1 << g.n) - 1, 0)
    return sorted(out)


def greedy_clique_cover(g: Graph, nodes: Iterable[int] | None = None) -> list[list[int]]:
    """Partition ``nodes`` into cliques, growing each from a max-degree seed."""
    left = set(range(g.n)) if nodes is None else set(nodes)
    cover = []
    while left:
        seed = max(left, key=lambda v: (len(g.adj[v] & left), -v))
        clique = [seed]
        cand = g.adj[seed] & left
        while cand:
            v = max(cand, key=lambda u: (len(g.adj[u] & cand), -u))
            clique.append(v)
            cand = cand & g.adj[v]
        cover.append(sorted(clique))
        left -= set(clique)
    return cover


def cover_labels(g: Graph, cover: list[list[int]] | None = None) -> np.ndarray:
    cover = greedy_clique_cover(g) if cover is None else cover
    lab = np.zeros(g.n, dtype=np.int64)
    for i, c in enumerate(cover):
        for v in c:
            lab[v] = i
    return lab


def stability_number(g: Graph, nodes: Iterable[int] | None = None) -> int:
    """Exact maximum stable-set size of ``g[nodes]``."""
    sub, _ = g.induced_subgraph(range(g.n) if nodes is None else list(nodes))
    if sub.n == 0:
        return 0
    indptr, indices = sub.csr()
    _, best, _ = _kernels.max_weight_stable(
        indptr, indices, np.ones(sub.n, dtype=np.int64),
        np.zeros((0, sub.n), dtype=np.int64), np.zeros(0, dtype=np.int64), cover_labels(sub))
    return int(best)
