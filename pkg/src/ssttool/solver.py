"""Exact branch-and-cut for maximum-weight stable set with symmetry settings."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .graph import Graph, greedy_clique_cover, stability_number
from .lp import solve_lp
from .permgroup import Bsgs, Perm, graph_automorphisms, schreier_sims
from .rational import Inequality, IneqSystem
from .sst import (LeaderPolicy, PresolveReport, SstPlan, deleted_nodes, presolve, run_sst_algorithm,
                  separate_sst_path_cuts, sst_cuts)

NEIGHBORHOOD_CAP = 20


@dataclass(frozen=True)
class Settings:
    name: str
    policy: LeaderPolicy | None = None
    presolve: bool = False
    add_edges: bool = True
    sst_cuts: bool = False
    sst_clique_cuts: bool = False
    resymmetrize: bool = False
    path_cuts: bool = False
    max_rounds: int = 10

    @property
    def uses_symmetry(self) -> bool:
        return self.presolve or self.sst_cuts or self.sst_clique_cuts

    @classmethod
    def named(cls, name: str) -> "Settings":
        try:
            return SETTINGS[name]
        except KeyError:
            raise ValueError(f"unknown setting {name!r}; choose from {', '.join(SETTINGS)}") from None


_MIN, _MAX, _STR = LeaderPolicy.MIN, LeaderPolicy.MAX, LeaderPolicy.STRINGENT

SETTINGS: dict[str, Settings] = {s.name: s for s in [
    Settings("default"),
    Settings("SST-pre-min", _MIN, presolve=True),
    Settings("SST-pre-max", _MAX, presolve=True),
    Settings("SST-pre-str", _STR, presolve=True),
    Settings("SST-pre-str-ne", _STR, presolve=True, add_edges=False),
    Settings("SSTC-min", _MIN, sst_cuts=True),
    Settings("SSTC-max", _MAX, sst_cuts=True),
    Settings("SSTC-str", _STR, sst_cuts=True),
    Settings("SSTCC", _STR, sst_clique_cuts=True),
    Settings("SSTCCC", _STR, sst_cuts=True, sst_clique_cuts=True),
    Settings("SSTCC-pre-str", _STR, presolve=True, sst_clique_cuts=True, resymmetrize=True),
]}


@dataclass
class SolveResult:
    optimum: int | None
    incumbent: list[int]
    nodes: int
    time: float
    cuts_added: dict[str, int] = field(default_factory=dict)
    presolve: PresolveReport | None = None
    status: str = "optimal"  # optimal | time-limit | cutoff
    bound: Fraction | None = None
    root_bound: Fraction | None = None
    presolve_time: float = 0.0
    plan: SstPlan | None = None
    leaders: int = 0
    followers: int = 0


# ---------------------------------------------------------------------------
# separation helpers


def _heaviest_clique(g: Graph, x: Sequence[Fraction], cand: set[int]) -> tuple[Fraction, list[int]]:
    """Exact max-weight clique inside ``cand`` (weights ``x``, all positive)."""
    order = sorted(cand, key=lambda v: (-x[v], v))
    best: list = [Fraction(0), []]

    def grow(cur: list[int], w: Fraction, rest: list[int]) -> None:
        if w > best[0]:
            best[0], best[1] = w, list(cur)
        bound = w + sum((x[v] for v in rest), Fraction(0))
        if bound <= best[0]:
            return
        for i, v in enumerate(rest):
            if w + sum((x[u] for u in rest[i:]), Fraction(0)) <= best[0]:
                return
            cur.append(v)
            grow(cur, w + x[v], [u for u in rest[i + 1:] if u in g.adj[v]])
            cur.pop()

    grow([], Fraction(0), order)
    return best[0], best[1]


def _extend(g: Graph, clique: list[int], within: set[int] | None = None) -> tuple[int, ...]:
    cand = set(within if within is not None else range(g.n))
    for v in clique:
        cand &= g.adj[v]
    out = list(clique)
    while cand:
        v = min(cand, key=lambda u: (-len(g.adj[u] & cand), u))
        out.append(v)
        cand &= g.adj[v]
    return tuple(sorted(out))


def _clique_row(c: Sequence[int]) -> Inequality:
    return Inequality({v: Fraction(1) for v in c}, Fraction(1), kind="clique")


def _separate_cliques(g: Graph, x: list[Fraction], seen: set) -> list[Inequality]:
    support = {v for v in range(g.n) if x[v] > 0}
    out = []
    for v in sorted(support, key=lambda u: (-x[u], u)):
        w, c = _heaviest_clique(g, x, g.adj[v] & support)
        if x[v] + w > 1:
            key = ("clique", _extend(g, [v] + c))
            if key not in seen:
                seen.add(key)
                out.append(_clique_row(key[1]))
    return out


def _separate_sst_cliques(g: Graph, plan: SstPlan, x: list[Fraction], seen: set,
                          fixed: set[int]) -> list[Inequality]:
    out = []
    for i, l in enumerate(plan.leaders):
        fol = {f for f in plan.followers(i) if f not in fixed}
        support = {f for f in fol if x[f] > 0}
        for f in sorted(support, key=lambda u: (-x[u], u)):
            w, c = _heaviest_clique(g, x, g.adj[f] & support)
            if x[f] + w > x[l]:
                clique = _extend(g, [f] + c, fol)
                key = ("sst-clique", l, clique)
                if key not in seen:
                    seen.add(key)
                    coeffs = {u: Fraction(1) for u in clique}
                    coeffs[l] = Fraction(-1)
                    out.append(Inequality(coeffs, Fraction(0), kind="sst-clique"))
    return out


def neighborhood_cuts(g: Graph, cap: int = NEIGHBORHOOD_CAP) -> list[Inequality]:
    """``sum_{N(v)} x + alpha(N(v)) x_v <= alpha(N(v))`` for small neighbourhoods."""
    out = []
    for v in range(g.n):
        nb = sorted(g.adj[v])
        if not nb or len(nb) > cap:
            continue
        a = stability_number(g, nb)
        coeffs = {u: Fraction(1) for u in nb}
        coeffs[v] = Fraction(a)
        out.append(Inequality(coeffs, Fraction(a), kind="neighborhood"))
    return out


def _lift(perms: Sequence[Perm], ids: Sequence[int], n: int) -> list[Perm]:
    out = []
    for p in perms:
        q = list(range(n))
        for i, v in enumerate(ids):
            q[v] = ids[p[i]]
        out.append(tuple(q))
    return out


def symmetry_group(g: Graph, generators: Sequence[Sequence[int]] | None = None) -> Bsgs:
    """Weight-preserving automorphism group, or the group of checked user generators."""
    if generators is None:
        gens = graph_automorphisms(g)
    else:
        gens = [tuple(p) for p in generators]
        for p in gens:
            if len(p) != g.n:
                raise ValueError("generator degree differs from the graph order")
            if any(g.weights[p[v]] != g.weights[v] or {p[u] for u in g.adj[v]} != set(g.adj[p[v]])
                   for v in range(g.n)):
                raise ValueError(f"generator {p} is not a weight-preserving automorphism")
    return schreier_sims(gens, g.n)


# ---------------------------------------------------------------------------
# branch and cut


def branch_and_cut(g: Graph, settings: Settings | str = "default", cutoff: int | None = None,
                   time_limit: float | None = None,
                   generators: Sequence[Sequence[int]] | None = None) -> SolveResult:
    """Maximum-weight stable set of ``g`` under ``settings``.

    ``cutoff`` is a known achievable value: nodes whose bound falls below it
    are pruned.  If the time limit is hit, the result has status
    ``time-limit`` with ``bound`` as the best remaining dual bound.
    """
    if isinstance(settings, str):
        settings = Settings.named(settings)
    if any(not isinstance(w, int) for w in g.weights):
        raise ValueError("weights must be integers")
    t0 = time.perf_counter()
    n = g.n
    weights = [Fraction(w) for w in g.weights]
    cuts_added: dict[str, int] = {}

    work, report, plan, pre_time = g, None, None, 0.0
    fixed: set[int] = set()
    group = symmetry_group(g, generators) if settings.uses_symmetry else None
    if settings.presolve:
        ts = time.perf_counter()
        work, pplan, report = presolve(g, group, settings.policy, settings.add_edges)
        pre_time = time.perf_counter() - ts
        fixed = set(report.deleted)
        plan = pplan
        if settings.resymmetrize:
            keep = [v for v in range(n) if v not in fixed]
            sub, ids = work.induced_subgraph(keep)
            group = schreier_sims(_lift(graph_automorphisms(sub), ids, n), n)
    if settings.sst_cuts or settings.sst_clique_cuts:
        plan = run_sst_algorithm(group, settings.policy)
        # a follower adjacent to its leader is zero in every cut-feasible stable set
        fixed |= deleted_nodes(work, plan)

    seen: set = set()
    rows: list[Inequality] = []

    def add(cuts: list[Inequality]) -> None:
        for q in cuts:
            rows.append(q)
            cuts_added[q.kind] = cuts_added.get(q.kind, 0) + 1

    survivors = [v for v in range(n) if v not in fixed]
    seed = []
    for c in greedy_clique_cover(work, survivors):
        key = ("clique", _extend(work, c))
        if len(key[1]) > 1 and key not in seen:
            seen.add(key)
            seed.append(_clique_row(key[1]))
    add(seed)
    if settings.sst_cuts and plan is not None:
        add([c.inequality() for c in sst_cuts(plan)])
    lazy = neighborhood_cuts(work)
    lazy_used = [False] * len(lazy)

    def separate(x: list[Fraction]) -> list[Inequality]:
        found = _separate_cliques(work, x, seen)
        for k, q in enumerate(lazy):
            if not lazy_used[k] and q.violation(x) > 0:
                lazy_used[k] = True
                found.append(q)
        if settings.sst_clique_cuts and plan is not None:
            found += _separate_sst_cliques(work, plan, x, seen, fixed)
        if settings.path_cuts and plan is not None and not found:
            for q in separate_sst_path_cuts(x, work, plan):
                key = ("path", tuple(sorted(q.coeffs.items())), q.rhs)
                if key not in seen:
                    seen.add(key)
                    found.append(q)
        return found

    best_val: int | None = None
    best_set: list[int] = []
    nodes = 0
    root_bound: Fraction | None = None
    lo0 = [Fraction(0)] * n
    hi0 = [Fraction(0) if v in fixed else Fraction(1) for v in range(n)]
    stack = [(lo0, hi0)]
    status = "optimal"
    open_bound: Fraction | None = None

    def need() -> float:
        if best_val is not None:
            return best_val + 1
        return cutoff if cutoff is not None else -math.inf

    while stack:
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            status = "time-limit"
            open_bound = max((_bound_hint(weights, hi) for _, hi in stack), default=None)
            break
        lo, hi = stack.pop()
        nodes += 1
        rounds = 0
        while True:
            res = solve_lp(IneqSystem.from_inequalities(n, rows, lo, hi), weights)
            if res.status != "optimal":
                x = None
                break
            x = res.point
            integral = all(v.denominator == 1 for v in x)
            if math.floor(res.value) < need():
                break
            cuts = separate(x)
            if not cuts or (rounds >= settings.max_rounds and not integral):
                break
            add(cuts)
            rounds += 1
        if nodes == 1:
            root_bound = res.value if x is not None else None
        if x is None or math.floor(res.value) < need():
            continue
        if integral:
            chosen = [v for v in range(n) if x[v] == 1]
            best_val, best_set = int(res.value), chosen
            continue
        frac = [v for v in range(n) if x[v].denominator != 1]

        def free_nbrs(v: int) -> int:
            return sum(1 for u in work.adj[v] if lo[u] != hi[u])

        v = min(frac, key=lambda u: (-free_nbrs(u), u))
        lo0b, hi0b = list(lo), list(hi)
        hi0b[v] = Fraction(0)
        lo1, hi1 = list(lo), list(hi)
        lo1[v] = Fraction(1)
        for u in work.adj[v]:
            hi1[u] = Fraction(0)
        stack.append((lo0b, hi0b))
        stack.append((lo1, hi1))

    if status == "optimal" and best_val is None and cutoff is not None:
        status = "cutoff"
    elapsed = time.perf_counter() - t0
    bound = Fraction(best_val) if status == "optimal" and best_val is not None else open_bound
    return SolveResult(best_val, best_set, nodes, elapsed, cuts_added, report, status, bound,
                       root_bound, pre_time, plan,
                       len(plan.leaders) if plan else 0, plan.num_cuts if plan else 0)


def _bound_hint(weights: list[Fraction], hi: list[Fraction]) -> Fraction:
    return sum((w for w, h in zip(weights, hi) if h > 0 and w > 0), Fraction(0))


def with_overrides(settings: Settings, **kw) -> Settings:
    """Copy of ``settings`` with flags changed; the name becomes ``custom`` unless unchanged."""
    changed = {k: v for k, v in kw.items() if v is not None and getattr(settings, k) != v}
    if not changed:
        return settings
    return replace(settings, name="custom", **changed)
