"""Clique matrices, total unimodularity checks, network matrices and integer-hull oracles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .graph import Graph, OutForest, maximal_cliques
from .rational import Inequality, IneqSystem, RatMatrix
from .sst import SstPlan, best_stable_set, deleted_nodes, sst_clique_cuts

__all__ = [
    "RatMatrix", "IneqSystem", "Inequality", "TuVerdict", "NetworkTree",
    "clique_matrix", "clique_formulation", "extend_for_theorem", "is_totally_unimodular",
    "check_predecessor_preserving", "build_network_tree", "network_matrix",
    "extended_path_matrix", "integer_hull_oracle", "affine_rank",
]


def clique_matrix(g: Graph) -> RatMatrix:
    cliques = maximal_cliques(g)
    rows = [[1 if v in set(c) else 0 for v in range(g.n)] for c in cliques]
    return RatMatrix(rows, g.n, row_labels=[("clique", c) for c in cliques])


def clique_formulation(g: Graph) -> IneqSystem:
    """Maximal-clique inequalities plus the unit box."""
    return IneqSystem(clique_matrix(g), [1] * len(maximal_cliques(g)))


def extend_for_theorem(g: Graph, plan: SstPlan) -> RatMatrix:
    """Clique matrix plus all SST clique cut rows, minus columns of deleted nodes.

    Rows that become empty after the column deletion are dropped.  Column
    labels are the surviving node ids.
    """
    base = clique_matrix(g)
    rows = [list(r) for r in base.rows]
    labels = list(base.row_labels)
    for cut in sst_clique_cuts(plan, g):
        r = [Fraction(0)] * g.n
        r[cut.leader] = Fraction(-1)
        for f in cut.clique:
            r[f] = Fraction(1)
        rows.append(r)
        labels.append(("sst-clique", cut.leader, cut.clique))
    gone = deleted_nodes(g, plan)
    keep = [v for v in range(g.n) if v not in gone]
    out_rows, out_labels = [], []
    for r, lab in zip(rows, labels):
        rr = [r[v] for v in keep]
        if any(rr):
            out_rows.append(rr)
            out_labels.append(lab)
    return RatMatrix(out_rows, len(keep), out_labels, keep)


# ---------------------------------------------------------------------------
# total unimodularity


@dataclass
class TuVerdict:
    """``witness`` is ``(row ids, col ids, det)`` in the input's indexing."""

    is_tu: bool
    witness: tuple[list[int], list[int], int] | None = None
    exact: bool = True

    def describe(self, m: RatMatrix | None = None) -> str:
        if self.is_tu:
            return "TU" if self.exact else "no counterexample found (sampled, not a proof)"
        rows, cols, det = self.witness
        if m is not None:
            rows = [m.row_labels[i] for i in rows]
            cols = [m.col_labels[j] for j in cols]
        return f"NOT TU: rows {rows} cols {cols} det {det}"


def _reduce(M: np.ndarray) -> tuple[np.ndarray, list[int], list[int]]:
    """Drop rows/columns that cannot occur in a bad minor."""
    rows = list(range(M.shape[0]))
    cols = list(range(M.shape[1]))
    changed = True
    while changed:
        changed = False
        sub = M[np.ix_(rows, cols)]
        nzr = (sub != 0).sum(axis=1)
        keep_r, seen = [], set()
        for i, r in enumerate(rows):
            key = tuple(sub[i])
            neg = tuple(-sub[i])
            if nzr[i] <= 1 or key in seen or neg in seen:
                changed = True
                continue
            seen.add(key)
            keep_r.append(r)
        rows = keep_r
        sub = M[np.ix_(rows, cols)]
        nzc = (sub != 0).sum(axis=0)
        keep_c, seen = [], set()
        for j, c in enumerate(cols):
            key = tuple(sub[:, j])
            neg = tuple(-sub[:, j])
            if nzc[j] <= 1 or key in seen or neg in seen:
                changed = True
                continue
            seen.add(key)
            keep_c.append(c)
        cols = keep_c
        if not rows or not cols:
            return M[np.ix_(rows, cols)], rows, cols
    return M[np.ix_(rows, cols)], rows, cols


def _int_det(A: list[list[int]]) -> int:
    """Bareiss on Python ints (no overflow)."""
    k = len(A)
    if k == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for i in range(k - 1):
        if M[i][i] == 0:
            p = next((q for q in range(i + 1, k) if M[q][i] != 0), None)
            if p is None:
                return 0
            M[i], M[p] = M[p], M[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                M[r][c] = (M[r][c] * M[i][i] - M[r][i] * M[i][c]) // prev
        prev = M[i][i]
    return sign * M[k - 1][k - 1]


def is_totally_unimodular(m: RatMatrix, mode: str = "exhaustive", samples: int = 2000,
                          seed: int = 0, max_dim: int = 24) -> TuVerdict:
    """Exact TU test (``exhaustive``) or a random search for a bad minor (``sampled``).

    The exhaustive test looks for a column set with no equitable
    bicolouring, by increasing size, on the smaller side of the matrix; the
    first such set carries a square minor of determinant >= 2 in absolute
    value, which is returned.  It is exponential in ``min(rows, cols)``.
    """
    M = m.to_int_array() if m.shape[0] and m.shape[1] else np.zeros(m.shape, dtype=np.int64)
    if M.size and not np.isin(M, (-1, 0, 1)).all():
        i, j = map(int, np.argwhere(~np.isin(M, (-1, 0, 1)))[0])
        raise ValueError(f"entry ({i},{j}) = {M[i, j]} is not in {{0, +1, -1}}")
    if mode == "sampled":
        return _sampled_tu(M, samples, seed)
    if mode != "exhaustive":
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    R, rows, cols = _reduce(M)
    if R.size == 0:
        return TuVerdict(True)
    flipped = R.shape[0] < R.shape[1]
    W = np.ascontiguousarray(R.T if flipped else R)
    if W.shape[1] > max_dim:
        raise ValueError(f"exhaustive check over {W.shape[1]} columns exceeds max_dim={max_dim}; use mode='sampled'")
    mask = int(_kernels.first_failing_subset(W))
    if mask < 0:
        return TuVerdict(True)
    sel = np.array([j for j in range(W.shape[1]) if (mask >> j) & 1], dtype=np.int64)
    cand = np.array([i for i in range(W.shape[0]) if (W[i, sel] != 0).any()], dtype=np.int64)
    wr, det = _kernels.find_bad_minor(W, sel, cand)
    if len(wr) == 0:  # pragma: no cover - excluded by minimality of the failing set
        raise RuntimeError("failing column set without a bad minor")
    wr = [int(v) for v in wr]
    wc = [int(v) for v in sel]
    if flipped:
        wr, wc = wc, wr
    return TuVerdict(False, (sorted(rows[i] for i in wr), sorted(cols[j] for j in wc), int(det)))


def _sampled_tu(M: np.ndarray, samples: int, seed: int) -> TuVerdict:
    rng = np.random.default_rng(seed)
    r, c = M.shape
    for k in range(2, min(r, c) + 1):
        for _ in range(samples):
            ri = np.sort(rng.choice(r, size=k, replace=False))
            ci = np.sort(rng.choice(c, size=k, replace=False))
            sub = np.ascontiguousarray(M[np.ix_(ri, ci)])
            d = int(_kernels.bareiss_det(sub)) if k <= 16 else _int_det(sub.tolist())
            if abs(d) >= 2:
                return TuVerdict(False, ([int(v) for v in ri], [int(v) for v in ci], d), exact=True)
    return TuVerdict(True, exact=False)


# ---------------------------------------------------------------------------
# predecessor-preserving families and network matrices


def _validate_family(f: OutForest, sets: Sequence[Iterable[int]]) -> list[list[int]]:
    fam = [sorted(set(s)) for s in sets]
    seen: set[int] = set()
    for s in fam:
        for v in s:
            if v in seen:
                raise ValueError(f"node {v} occurs in more than one set")
            seen.add(v)
        for a in s:
            for b in s:
                if a != b and f.precedes(a, b):
                    raise ValueError(f"set {s} is not incomparable ({a} precedes {b})")
    return fam


def check_predecessor_preserving(f: OutForest, sets: Sequence[Iterable[int]]) -> bool:
    fam = _validate_family(f, sets)
    for i, s1 in enumerate(fam):
        for j, s2 in enumerate(fam):
            if i == j:
                continue
            for v in s1:
                hits = [f.precedes(v, w) for w in s2]
                if any(hits) and not all(hits):
                    return False
    return True


@dataclass
class NetworkTree:
    """Directed tree ``arcs`` with column labels ``lam`` plus non-tree arcs ``abar``
    with row labels ``mu``.  Node ``'d'`` is the dummy; ``'root'`` is the
    virtual root added for disconnected forests (its column is dropped).
    """

    nodes: list
    arcs: list[tuple]
    lam: list
    abar: list[tuple]
    mu: list
    virtual_root: bool = False


def build_network_tree(f: OutForest, sets: Sequence[Iterable[int]], order: Sequence[int]) -> NetworkTree:
    """Tree and arcs whose network matrix is the path matrix of ``f`` plus
    the rows ``-x_v + x_w <= 0`` for ``v`` ranked above ``w`` in a common set.

    ``order`` lists nodes from greatest to smallest.  Singleton sets carry
    no ordering rows and are ignored.
    """
    fam = [s for s in _validate_family(f, sets) if len(s) > 1]
    if not check_predecessor_preserving(f, fam):
        raise ValueError("family is not predecessor preserving")
    rank = {v: i for i, v in enumerate(order)}
    if any(v not in rank for s in fam for v in s):
        raise ValueError("order must rank every node of the family")
    roots = f.roots
    virtual = len(roots) != 1
    parent: dict = {v: f.parent[v] for v in range(f.n)}
    if virtual:
        for r in roots:
            parent[r] = "root"
        parent["root"] = None
        top = "root"
    else:
        top = roots[0]

    def ancestors(v):
        p = parent[v]
        while p is not None:
            yield p
            p = parent[p]

    in1 = {v for s in fam for v in s}
    arcs, lam = [], []
    for v in sorted(in1):
        p = next((a for a in ancestors(v) if a in in1), "d")
        arcs.append((p, v))
        lam.append(v)
    v2 = [v for v in parent if v not in in1]
    for v in v2:
        if v == top:
            continue
        a = next(a for a in ancestors(v) if a not in in1)
        arcs.append((v, a))
        lam.append(v)
    arcs.append((top, "d"))
    lam.append(top)

    abar, mu = [], []
    for idx, path in enumerate(f.root_leaf_paths()):
        full = (["root"] if virtual else []) + path
        u = [v for v in full if v not in in1][-1]
        last1 = [v for v in full if v in in1]
        abar.append((u, last1[-1] if last1 else "d"))
        mu.append(("path", idx))
    for s in fam:
        ranked = sorted(s, key=lambda v: rank[v])
        for a in range(len(ranked)):
            for b in range(a + 1, len(ranked)):
                abar.append((ranked[a], ranked[b]))
                mu.append(("order", ranked[a], ranked[b]))
    nodes = ["d"] + list(parent)
    return NetworkTree(nodes, arcs, lam, abar, mu, virtual)


def network_matrix(tree: NetworkTree) -> RatMatrix:
    """Entry ``+1``/``-1`` where the tree path of a non-tree arc uses a tree arc
    forwards/backwards.  Columns carry ``lam`` labels, rows ``mu`` labels.
    """
    nbrs: dict = {v: [] for v in tree.nodes}
    for k, (a, b) in enumerate(tree.arcs):
        if a not in nbrs or b not in nbrs:
            raise ValueError(f"tree arc {(a, b)} has an unknown endpoint")
        nbrs[a].append((b, k, 1))
        nbrs[b].append((a, k, -1))
    rows = []
    for u, v in tree.abar:
        if u not in nbrs or v not in nbrs:
            raise ValueError(f"arc {(u, v)} has an endpoint outside the tree")
        prev = {u: None}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y, k, s in nbrs[x]:
                if y not in prev:
                    prev[y] = (x, k, s)
                    queue.append(y)
        row = [0] * len(tree.arcs)
        x = v
        while prev[x] is not None:
            px, k, s = prev[x]
            row[k] = s
            x = px
        rows.append(row)
    cols = list(range(len(tree.arcs)))
    if tree.virtual_root:
        cols = [k for k in cols if tree.lam[k] != "root"]
    return RatMatrix([[r[k] for k in cols] for r in rows], len(cols),
                     list(tree.mu), [tree.lam[k] for k in cols])


def extended_path_matrix(f: OutForest, sets: Sequence[Iterable[int]], order: Sequence[int]) -> RatMatrix:
    """Root-leaf path incidence rows followed by the ordering rows."""
    rank = {v: i for i, v in enumerate(order)}
    rows, labels = [], []
    for idx, path in enumerate(f.root_leaf_paths()):
        on = set(path)
        rows.append([1 if v in on else 0 for v in range(f.n)])
        labels.append(("path", idx))
    for s in sets:
        ranked = sorted(set(s), key=lambda v: rank[v])
        for a in range(len(ranked)):
            for b in range(a + 1, len(ranked)):
                r = [0] * f.n
                r[ranked[a]] = -1
                r[ranked[b]] = 1
                rows.append(r)
                labels.append(("order", ranked[a], ranked[b]))
    return RatMatrix(rows, f.n, labels, list(range(f.n)))


# ---------------------------------------------------------------------------
# brute-force oracles


def integer_hull_oracle(g: Graph, extra_cuts: Iterable[Inequality] | IneqSystem = (),
                        objective: Sequence | None = None) -> tuple[Fraction | None, list[int]]:
    """Exact max of ``objective`` over binary stable sets obeying ``extra_cuts``.

    Ties are broken towards the lexicographically largest indicator vector.
    """
    if isinstance(extra_cuts, IneqSystem):
        extra_cuts = extra_cuts.inequalities()
    obj = [Fraction(v) for v in (objective if objective is not None else g.weights)]
    scale = 1
    for v in obj:
        scale = scale * v.denominator // np.gcd(scale, v.denominator)
    ints = [int(v * scale) for v in obj]
    value, arg = best_stable_set(g, ints, extra_cuts)
    return (None if value is None else Fraction(value, scale)), arg


def affine_rank(points: Sequence[Sequence]) -> int:
    if not points:
        raise ValueError("affine rank of an empty point set is undefined")
    p0 = [Fraction(v) for v in points[0]]
    rows = [[Fraction(v) - a for v, a in zip(p, p0)] for p in points[1:]]
    rank = 0
    ncols = len(p0)
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / pr[c]
                rows[r] = [a - f * b for a, b in zip(rows[r], pr)]
        rank += 1
    return rank
