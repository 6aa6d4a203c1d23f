"""Leader selection, symmetry-handling cuts, presolving and canonicalization.

A plan is an ordered list of leaders; step ``i`` records the orbit of its
leader under the pointwise stabilizer of the earlier leaders.  Every other
orbit member (a follower ``f``) yields the cut ``x_f <= x_leader``.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .graph import Graph, cover_labels, maximal_cliques
from .permgroup import (Bsgs, Perm, compose, identity, inverse, orbit_partition,
                        pointwise_stabilizer, schreier_sims)
from .rational import Inequality


class LeaderPolicy(str, Enum):
    FIRST = "first"
    MIN = "min"
    MAX = "max"
    STRINGENT = "stringent"


@dataclass(frozen=True)
class SstCut:
    leader: int
    follower: int

    def inequality(self) -> Inequality:
        return Inequality({self.leader: Fraction(-1), self.follower: Fraction(1)}, Fraction(0), kind="sst")


@dataclass(frozen=True)
class SstCliqueCut:
    leader: int
    clique: tuple[int, ...]

    def inequality(self) -> Inequality:
        coeffs = {f: Fraction(1) for f in self.clique}
        coeffs[self.leader] = Fraction(-1)
        return Inequality(coeffs, Fraction(0), kind="sst-clique")


@dataclass(frozen=True)
class SstPlan:
    """Leaders with the orbit each had when it was selected.

    ``removed[i]`` holds nodes that were barred from being chosen at step
    ``i`` (nodes already deleted by presolving); it is empty for plain runs.
    """

    n: int
    leaders: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]
    policy: str = "custom"
    removed: tuple[frozenset, ...] = ()

    def __post_init__(self):
        if len(self.leaders) != len(self.orbits):
            raise ValueError("one orbit per leader required")
        if len(set(self.leaders)) != len(self.leaders):
            raise ValueError("leaders must be distinct")
        for l, o in zip(self.leaders, self.orbits):
            if l not in o:
                raise ValueError(f"leader {l} missing from its orbit")
        if not self.removed:
            object.__setattr__(self, "removed", tuple(frozenset() for _ in self.leaders))

    def followers(self, i: int) -> list[int]:
        return [f for f in self.orbits[i] if f != self.leaders[i]]

    def cut_pairs(self) -> list[tuple[int, int]]:
        return [(l, f) for i, l in enumerate(self.leaders) for f in self.followers(i)]

    @property
    def num_cuts(self) -> int:
        return sum(len(o) - 1 for o in self.orbits)

    def to_text(self) -> str:
        return "".join(f"leader {l} orbit {' '.join(map(str, o))}\n"
                       for l, o in zip(self.leaders, self.orbits))

    @classmethod
    def from_text(cls, text: str, n: int) -> "SstPlan":
        leaders, orbits = [], []
        for lineno, line in enumerate(text.splitlines(), start=1):
            tok = line.split()
            if not tok:
                continue
            if len(tok) < 4 or tok[0] != "leader" or tok[2] != "orbit":
                raise ValueError(f"line {lineno}: expected 'leader <id> orbit <ids...>'")
            leaders.append(int(tok[1]))
            orbits.append(tuple(sorted(int(t) for t in tok[3:])))
        return cls(n, tuple(leaders), tuple(orbits))



# ---------------------------------------------------------------------------
# leader selection


def _orbit_sizes(stab: Bsgs) -> dict[int, tuple[int, ...]]:
    out = {}
    for orb in orbit_partition(stab.strong_gens, stab.n):
        t = tuple(orb)
        for p in orb:
            out[p] = t
    return out


def _select(stab: Bsgs, policy: LeaderPolicy, chosen: set, barred: set, pool: set,
            full: bool) -> int | None:
    orb = _orbit_sizes(stab)
    free = [p for p in range(stab.n) if p not in chosen and p not in barred]
    if policy is LeaderPolicy.STRINGENT:
        cand = [p for p in free if p in pool]
        if cand:
            return min(cand, key=lambda p: (len(orb[p]) < 2, len(orb[p]), p))
    nontrivial = [p for p in free if len(orb[p]) > 1]
    if nontrivial:
        if policy is LeaderPolicy.FIRST:
            return nontrivial[0]
        if policy is LeaderPolicy.MAX:
            return min(nontrivial, key=lambda p: (-len(orb[p]), p))
        return min(nontrivial, key=lambda p: (len(orb[p]), p))
    if full and free:
        return free[0]
    return None


def run_sst_algorithm(group: Bsgs, policy: LeaderPolicy | str = LeaderPolicy.MIN,
                      full: bool = False) -> SstPlan:
    """Select leaders until the stabilizer is trivial (and, for the stringent
    policy, no earlier orbit still holds an unused node).

    ``full=True`` keeps going until every point is a leader.
    """
    policy = LeaderPolicy(policy)
    stab = group
    leaders: list[int] = []
    orbits: list[tuple[int, ...]] = []
    pool: set[int] = set()
    while True:
        l = _select(stab, policy, set(leaders), set(), pool, full)
        if l is None:
            break
        o = tuple(stab.orbit(l))
        leaders.append(l)
        orbits.append(o)
        pool |= set(o)
        pool -= set(leaders)
        stab = pointwise_stabilizer(stab, [l])
    return SstPlan(group.n, tuple(leaders), tuple(orbits), policy.value)


def plan_from_leaders(group: Bsgs, leaders: Sequence[int], policy: str = "custom") -> SstPlan:
    stab = group
    orbits = []
    for l in leaders:
        if not 0 <= l < group.n:
            raise ValueError(f"leader {l} out of range")
        orbits.append(tuple(stab.orbit(l)))
        stab = pointwise_stabilizer(stab, [l])
    return SstPlan(group.n, tuple(leaders), tuple(orbits), policy)


def random_plan(group: Bsgs, rng: random.Random, max_leaders: int | None = None) -> SstPlan:
    """Leaders drawn uniformly from the points still moved by the stabilizer."""
    stab = group
    leaders: list[int] = []
    while not stab.is_trivial() and (max_leaders is None or len(leaders) < max_leaders):
        moved = sorted({p for s in stab.strong_gens for p in range(stab.n) if s[p] != p})
        leaders.append(rng.choice(moved))
        stab = pointwise_stabilizer(stab, [leaders[-1]])
    return plan_from_leaders(group, leaders, "random")


def is_stringent(plan: SstPlan, group: Bsgs) -> bool:
    if plan.n != group.n:
        raise ValueError(f"plan degree {plan.n} differs from group degree {group.n}")
    stab = group
    pool: set[int] = set()
    for i, l in enumerate(plan.leaders):
        o = tuple(stab.orbit(l))
        if o != tuple(plan.orbits[i]):
            raise ValueError(f"plan orbit at step {i} does not match the group")
        avail = pool - set(plan.leaders[:i]) - plan.removed[i]
        if avail and l not in avail:
            return False
        pool |= set(o)
        stab = pointwise_stabilizer(stab, [l])
    return True


# ---------------------------------------------------------------------------
# cuts


def sst_cuts(plan: SstPlan) -> list[SstCut]:
    return [SstCut(l, f) for l, f in plan.cut_pairs()]


def sst_clique_cuts(plan: SstPlan, g: Graph) -> list[SstCliqueCut]:
    """One cut per maximal clique of ``g[orbit - {leader}]`` for each leader."""
    out = []
    for i, l in enumerate(plan.leaders):
        fol = plan.followers(i)
        if not fol:
            continue
        sub, ids = g.induced_subgraph(fol)
        for c in maximal_cliques(sub):
            out.append(SstCliqueCut(l, tuple(ids[j] for j in c)))
    return out


def deleted_nodes(g: Graph, plan: SstPlan) -> set[int]:
    """Followers adjacent to their own leader."""
    return {f for l, f in plan.cut_pairs() if f in g.adj[l]}


# ---------------------------------------------------------------------------
# presolving


@dataclass
class PresolveReport:
    deleted: set[int] = field(default_factory=set)
    added_edges: list[tuple[int, int]] = field(default_factory=list)
    rounds: int = 0


def presolve(g: Graph, group: Bsgs, policy: LeaderPolicy | str = LeaderPolicy.MIN,
             add_edges: bool = True, leaders: Sequence[int] | None = None
             ) -> tuple[Graph, SstPlan, PresolveReport]:
    """Interleave leader selection with deletion and (optionally) addition.

    Each round deletes the followers adjacent to the new leader, then joins
    every surviving follower to the leader's current neighbours.  Deleted
    nodes stay in the returned graph as isolated nodes and are listed in the
    report; they must be fixed to zero.  Deleted nodes are never chosen as
    later leaders.  ``leaders`` overrides the policy with a fixed sequence.
    """
    if add_edges and any(w == 0 for w in g.weights):
        raise ValueError("edge addition requires nonzero weights")
    policy = LeaderPolicy(policy)
    adj = [set(a) for a in g.adj]
    report = PresolveReport()
    stab = group
    chosen: list[int] = []
    orbits: list[tuple[int, ...]] = []
    removed: list[frozenset] = []
    pool: set[int] = set()
    step = 0
    while True:
        if leaders is not None:
            if step >= len(leaders):
                break
            l = leaders[step]
            if l in report.deleted:
                raise ValueError(f"leader {l} was deleted in an earlier round")
        else:
            l = _select(stab, policy, set(chosen), report.deleted, pool, False)
            if l is None:
                break
        step += 1
        o = tuple(stab.orbit(l))
        removed.append(frozenset(report.deleted))
        chosen.append(l)
        orbits.append(o)
        pool |= set(o)
        pool -= set(chosen)
        stab = pointwise_stabilizer(stab, [l])
        fol = [f for f in o if f != l and f not in report.deleted]
        if not fol:
            continue
        report.rounds += 1
        for f in fol:
            if f in adj[l]:
                report.deleted.add(f)
                for v in adj[f]:
                    adj[v].discard(f)
                adj[f] = set()
        if add_edges:
            for f in fol:
                if f in report.deleted:
                    continue
                for v in sorted(adj[l]):
                    if v != f and v not in adj[f]:
                        adj[f].add(v)
                        adj[v].add(f)
                        report.added_edges.append((min(v, f), max(v, f)))
    out = Graph(g.n, tuple(frozenset(a) for a in adj), g.weights)
    plan = SstPlan(g.n, tuple(chosen), tuple(orbits), policy.value if leaders is None else "custom",
                   tuple(removed))
    return out, plan, report


# ---------------------------------------------------------------------------
# canonicalization


def _chain_for_plan(group: Bsgs, plan: SstPlan) -> Bsgs:
    if plan.n != group.n:
        raise ValueError("plan and group have different degrees")
    chain = schreier_sims(group.strong_gens, group.n, base_prefix=plan.leaders)
    for i, o in enumerate(plan.orbits):
        if tuple(sorted(chain.transversals[i])) != tuple(o):
            raise ValueError(f"plan orbit at step {i} is inconsistent with the group")
    return chain


def act(gamma: Perm, x: Sequence) -> list:
    """Move the value at coordinate ``i`` to coordinate ``gamma[i]``."""
    out = [None] * len(x)
    for i, v in enumerate(x):
        out[gamma[i]] = v
    return out


def canonicalizing_perm(x: Sequence, group: Bsgs, plan: SstPlan) -> Perm:
    chain = _chain_for_plan(group, plan)
    y = list(x)
    total = identity(group.n)
    for i, l in enumerate(plan.leaders):
        orbit_i = sorted(chain.transversals[i])
        best = max(orbit_i, key=lambda j: (y[j], -j))
        gamma = inverse(chain.transversals[i][best])
        y = act(gamma, y)
        total = compose(gamma, total)
    return total


def canonicalize(x: Sequence, group: Bsgs, plan: SstPlan) -> list:
    """A point of the orbit of ``x`` that satisfies every cut of ``plan``."""
    return act(canonicalizing_perm(x, group, plan), x)


# ---------------------------------------------------------------------------
# auxiliary graph and path cuts


def build_auxiliary_graph(g: Graph, plan: SstPlan) -> tuple[Graph, dict[int, int]]:
    """Add one node per leader, joined to the leader's whole orbit."""
    extra = {l: g.n + i for i, l in enumerate(plan.leaders)}
    edges = g.edges() + [(f, extra[l]) for i, l in enumerate(plan.leaders) for f in plan.orbits[i]]
    return Graph.from_edges(g.n + len(extra), edges, list(g.weights) + [0] * len(extra)), extra


def _odd_cycle_from_walk(walk: list[int]) -> list[int]:
    """Shrink a closed walk of odd length (``walk[0] == walk[-1]``) to an odd simple cycle."""
    w = list(walk)
    while True:
        last: dict[int, int] = {}
        cut = None
        for pos, v in enumerate(w[:-1]):
            if v in last:
                cut = (last[v], pos)
                break
            last[v] = pos
        if cut is None:
            return w[:-1]
        a, b = cut
        if (b - a) % 2 == 1:
            w = w[a:b + 1]
        else:
            w = w[:a] + w[b:]


def _dijkstra(nadj: list[list[tuple[int, Fraction]]], src: int) -> tuple[list, list]:
    dist: list = [None] * len(nadj)
    prev = [-1] * len(nadj)
    dist[src] = Fraction(0)
    heap = [(Fraction(0), src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d != dist[u]:
            continue
        for v, w in nadj[u]:
            nd = d + w
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, prev


def separate_sst_path_cuts(xstar: Sequence, g: Graph, plan: SstPlan, limit: int = 50
                           ) -> list[Inequality]:
    """Violated odd-cycle inequalities of the auxiliary graph, projected back.

    Exact when ``xstar`` satisfies the edge inequalities and the plain SST
    cuts (the edge costs below are then nonnegative).  Cycles through a
    leader node become path cuts; the others are odd-cycle cuts of ``g``.
    """
    x = [Fraction(v) for v in xstar]
    if len(x) != g.n:
        raise ValueError("xstar has the wrong length")
    if any(v < 0 or v > 1 for v in x):
        raise ValueError("xstar must lie in the unit box")
    aux, extra = build_auxiliary_graph(g, plan)
    back = {v: l for l, v in extra.items()}
    z = x + [1 - x[back[v]] for v in range(g.n, aux.n)]
    nadj: list[list[tuple[int, Fraction]]] = [[] for _ in range(2 * aux.n)]
    for u, v in aux.edges():
        w = max(Fraction(0), 1 - z[u] - z[v])
        if w >= 1:
            continue
        nadj[2 * u].append((2 * v + 1, w))
        nadj[2 * u + 1].append((2 * v, w))
        nadj[2 * v].append((2 * u + 1, w))
        nadj[2 * v + 1].append((2 * u, w))
    found: dict[tuple, tuple[Fraction, Inequality]] = {}
    for s in range(aux.n):
        dist, prev = _dijkstra(nadj, 2 * s)
        d = dist[2 * s + 1]
        if d is None or d >= 1:
            continue
        walk = [2 * s + 1]
        while walk[-1] != 2 * s:
            walk.append(prev[walk[-1]])
        cyc = _odd_cycle_from_walk([v // 2 for v in reversed(walk)])
        key = tuple(sorted(cyc))
        if key in found:
            continue
        coeffs: dict[int, Fraction] = {}
        rhs = Fraction(len(cyc) - 1, 2)
        through = False
        for v in cyc:
            if v < g.n:
                coeffs[v] = coeffs.get(v, Fraction(0)) + 1
            else:
                through = True
                rhs -= 1
                l = back[v]
                coeffs[l] = coeffs.get(l, Fraction(0)) - 1
        coeffs = {j: c for j, c in coeffs.items() if c != 0}
        q = Inequality(coeffs, rhs, kind="sst-path" if through else "odd-cycle")
        viol = q.violation(x)
        if viol > 0:
            found[key] = (viol, q)
    ranked = sorted(found.items(), key=lambda kv: (-kv[1][0], kv[0]))
    return [q for _, (_, q) in ranked[:limit]]


# ---------------------------------------------------------------------------
# hardness construction from 3-dimensional matching


@dataclass
class Reduction3dm:
    graph: Graph
    weights: list[int]
    plan: SstPlan
    group: Bsgs
    rows: int
    cols: int
    col_names: list[str]
    row_names: list[str]

    def node(self, r: int, c: int) -> int:
        return r * self.cols + c

    def dump(self) -> str:
        """Weight matrix with leaders marked ``*``; rows are triples."""
        width = max([len(s) for s in self.col_names] + [3])
        lead = set(self.plan.leaders)
        lines = [" " * 12 + " ".join(s.rjust(width) for s in self.col_names)]
        for r in range(self.rows):
            cells = []
            for c in range(self.cols):
                v = self.node(r, c)
                cells.append((("*" if v in lead else "") + str(self.weights[v])).rjust(width))
            lines.append(self.row_names[r].ljust(12) + " ".join(cells))
        return "\n".join(lines)


def reduction_3dm(k: int, triples: Sequence[tuple[int, int, int]]) -> Reduction3dm:
    """Disjoint-clique instance whose cut-constrained optimum is >= k iff a
    perfect 3-dimensional matching exists.

    ``triples`` hold indices ``(x, y, z)`` into three ground sets of size
    ``k``.  Columns are ordered triples first, then the x, y and z elements;
    node ``(r, c)`` has id ``r * cols + c``.
    """
    for t in triples:
        if len(t) != 3 or not all(isinstance(a, int) and 0 <= a < k for a in t):
            raise ValueError(f"malformed triple {t!r}")
    m = len(triples)
    cols = m + 3 * k
    n = m * cols
    edges = [(r1 * cols + c, r2 * cols + c) for c in range(cols)
             for r1, r2 in itertools.combinations(range(m), 2)]
    g = Graph.from_edges(n, edges)
    w = [0] * n
    for r, (a, b, c) in enumerate(triples):
        w[r * cols + r] = -2
        for col in (m + a, m + k + b, m + 2 * k + c):
            w[r * cols + col] = 1
    gens = []
    if cols >= 2 and m:
        def lift(colperm):
            return tuple(r * cols + colperm[c] for r in range(m) for c in range(cols))
        gens.append(lift([1, 0] + list(range(2, cols))))
        gens.append(lift(list(range(1, cols)) + [0]))
    group = schreier_sims(gens, n)
    plan = plan_from_leaders(group, [r * cols + r for r in range(m)], "custom")
    col_names = ([f"T{r + 1}" for r in range(m)] + [f"x{i + 1}" for i in range(k)]
                 + [f"y{i + 1}" for i in range(k)] + [f"z{i + 1}" for i in range(k)])
    row_names = [f"{{x{a + 1},y{b + 1},z{c + 1}}}" for a, b, c in triples]
    return Reduction3dm(g.with_weights(w), w, plan, group, m, cols, col_names, row_names)


# ---------------------------------------------------------------------------
# exact optimisation over stable sets with extra rows


def _rows_array(n: int, ineqs: Iterable[Inequality]) -> tuple[np.ndarray, np.ndarray]:
    ineqs = list(ineqs)
    rows = np.zeros((len(ineqs), n), dtype=np.int64)
    rhs = np.zeros(len(ineqs), dtype=np.int64)
    for r, q in enumerate(ineqs):
        if q.sense != "<=":
            raise ValueError("only '<=' rows are supported by the stable-set oracle")
        scale = 1
        for c in list(q.coeffs.values()) + [q.rhs]:
            scale = scale * Fraction(c).denominator // np.gcd(scale, Fraction(c).denominator)
        for j, c in q.coeffs.items():
            rows[r, j] = int(Fraction(c) * scale)
        # integer points: floor of the scaled right-hand side is exact
        rhs[r] = (Fraction(q.rhs) * scale).__floor__()
    return rows, rhs


def best_stable_set(g: Graph, objective: Sequence[int], ineqs: Iterable[Inequality] = ()
                    ) -> tuple[int | None, list[int]]:
    """Max of an integer objective over binary stable sets satisfying ``ineqs``.

    Ties go to the lexicographically largest indicator vector.  Returns
    ``(None, [])`` when no point is feasible.
    """
    rows, rhs = _rows_array(g.n, ineqs)
    if g.n == 0:
        return (0, []) if all(v >= 0 for v in rhs) else (None, [])
    indptr, indices = g.csr()
    found, best, bx = _kernels.max_weight_stable(
        indptr, indices, np.asarray(objective, dtype=np.int64), rows, rhs, cover_labels(g))
    if not found:
        return None, []
    return int(best), [v for v in range(g.n) if bx[v]]


def feasible_stable_sets(g: Graph, ineqs: Iterable[Inequality] = ()) -> list[int]:
    """Bitmasks of every binary stable set satisfying ``ineqs`` (small ``n`` only)."""
    rows, rhs = _rows_array(g.n, ineqs)
    indptr, indices = g.csr()
    return [int(m) for m in _kernels.enumerate_stable_sets(indptr, indices, g.n, rows, rhs)]
