"""Verification suites: each pits a structural claim against a brute-force oracle.

Every suite returns a ``SuiteReport``; a case that fails carries a dump of
the offending instance in ``detail``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import instances as inst
from .graph import Graph, OutForest, emit_dimacs, is_bipartite, maximal_cliques
from .lp import solve_lp
from .permgroup import Bsgs, from_cycles, graph_automorphisms, schreier_sims
from .polyhedra import (_int_det, build_network_tree, check_predecessor_preserving,
                        extend_for_theorem, extended_path_matrix, integer_hull_oracle,
                        is_totally_unimodular, network_matrix, affine_rank)
from .rational import Inequality, IneqSystem
from .sst import (SstCliqueCut, SstPlan, best_stable_set, build_auxiliary_graph,
                  canonicalize, feasible_stable_sets, plan_from_leaders, presolve,
                  random_plan, reduction_3dm, run_sst_algorithm, sst_cuts)


@dataclass
class CaseResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.cases.append(CaseResult(name, bool(passed), detail))

    def text(self, verbose: bool = False) -> str:
        lines = [f"suite {self.suite} seed {self.seed}: "
                 f"{sum(c.passed for c in self.cases)}/{len(self.cases)} passed"]
        for c in self.cases:
            if verbose or not c.passed:
                lines.append(f"  {'PASS' if c.passed else 'FAIL'} {c.name}"
                             + (f": {c.detail}" if c.detail else ""))
        return "\n".join(lines)


def _group(g: Graph) -> Bsgs:
    return schreier_sims(graph_automorphisms(g), g.n)


def _one_based(nodes) -> list[int]:
    return sorted(v + 1 for v in nodes)


# ---------------------------------------------------------------------------
# presolve trace on the 8-cycle


def suite_presolve(seed: int = 0) -> SuiteReport:
    """Leaders 1 then 3 on C8: delete {2,8}, add {4,7}, keep the 5<->7 swap."""
    rep = SuiteReport("presolve", seed)
    g = inst.c8()
    group = _group(g)
    out, plan, report = presolve(g, group, leaders=[0, 2])
    rep.add("deleted nodes", report.deleted == {1, 7}, f"deleted {_one_based(report.deleted)}")
    rep.add("added edges", report.added_edges == [(3, 6)],
            f"added {[tuple(_one_based(e)) for e in report.added_edges]}")
    swap = from_cycles([(4, 6)], g.n)
    keeps = all({swap[u] for u in out.adj[v]} == set(out.adj[swap[v]]) for v in range(g.n))
    in_group = _group(out).contains(swap)
    rep.add("5<->7 swap is an automorphism of the presolved graph", keeps and in_group,
            emit_dimacs(out) if not (keeps and in_group) else "")
    return rep


# ---------------------------------------------------------------------------
# total unimodularity of the extended clique matrix


def _witness_ok(m, verdict) -> tuple[bool, str]:
    if verdict.is_tu or verdict.witness is None:
        return False, "reported TU"
    rows, cols, det = verdict.witness
    sub = m.submatrix(rows, cols).to_int_array().tolist()
    d = _int_det(sub)
    return (abs(d) >= 2 and d == det,
            f"rows {[m.row_labels[i] for i in rows]} cols {[m.col_labels[j] for j in cols]} det {d}")


def suite_tu(seed: int = 0, count: int = 100, max_n: int = 14) -> SuiteReport:
    rep = SuiteReport("tu", seed)
    rng = random.Random(seed)
    for t in range(count):
        g = inst.orbit_weights(inst.random_tp(rng.randint(2, max_n), rng), rng)
        group = _group(g)
        plan = run_sst_algorithm(group, "stringent")
        m = extend_for_theorem(g, plan)
        v = is_totally_unimodular(m)
        rep.add(f"random TP #{t} (n={g.n}, |L|={len(plan.leaders)})", v.is_tu,
                "" if v.is_tu else v.describe(m) + "\n" + emit_dimacs(g) + plan.to_text())
    for name, g, leaders in (("fig4 non-stringent", inst.fig4(), inst.FIG4_NONSTRINGENT),
                             ("fig6", inst.fig6(), (inst.FIG6_LEADER,))):
        plan = plan_from_leaders(_group(g), leaders)
        m = extend_for_theorem(g, plan)
        ok, detail = _witness_ok(m, is_totally_unimodular(m))
        rep.add(f"control {name} is NOT TU", ok, detail)
    return rep


# ---------------------------------------------------------------------------
# network matrix of predecessor-preserving families


def random_family(f: OutForest, rng: random.Random, tries: int = 30) -> list[list[int]]:
    """Disjoint incomparable sets, grown while the family stays predecessor preserving."""
    fam: list[list[int]] = []
    used: set[int] = set()
    for _ in range(tries):
        free = [v for v in range(f.n) if v not in used]
        if len(free) < 2:
            break
        s = [rng.choice(free)]
        for v in rng.sample(free, len(free)):
            if v not in s and len(s) < 4 and not any(f.precedes(v, w) or f.precedes(w, v) for w in s):
                s.append(v)
        if len(s) < 2:
            continue
        if check_predecessor_preserving(f, fam + [sorted(s)]):
            fam.append(sorted(s))
            used |= set(s)
    return fam


def suite_network(seed: int = 0, count: int = 100, max_n: int = 16) -> SuiteReport:
    rep = SuiteReport("network", seed)
    rng = random.Random(seed)
    for t in range(count):
        f = inst.random_tp_forest(rng.randint(2, max_n), rng)
        fam = random_family(f, rng)
        order = list(range(f.n))
        rng.shuffle(order)
        tree = build_network_tree(f, fam, order)
        got = network_matrix(tree)
        want = extended_path_matrix(f, fam, order)
        ok = sorted(map(str, got.row_labels)) == sorted(map(str, want.row_labels)) \
            and sorted(got.col_labels) == list(range(f.n))
        if ok:
            ci = [got.col_labels.index(j) for j in range(f.n)]
            ri = [got.row_labels.index(lab) for lab in want.row_labels]
            ok = got.submatrix(ri, ci).rows == want.rows
        rep.add(f"forest #{t} (n={f.n}, {len(fam)} sets)", ok,
                "" if ok else f"parents {f.parent} family {fam} order {order}")
    return rep


# ---------------------------------------------------------------------------
# bipartite graphs: edges + SST cuts + even path cuts describe the hull


def induced_paths(g: Graph, s: int, t: int) -> list[list[int]]:
    """All induced s-t paths (brute force)."""
    out = []

    def walk(path: list[int]) -> None:
        u = path[-1]
        if u == t:
            out.append(list(path))
            return
        for w in sorted(g.adj[u]):
            if w in path or any(w in g.adj[p] for p in path[:-1]):
                continue
            path.append(w)
            walk(path)
            path.pop()

    walk([s])
    return out


def even_path_inequalities(g: Graph, plan: SstPlan) -> list[Inequality]:
    """``-x_l + sum_P x <= |P|/2 - 1`` for even induced leader-follower paths."""
    out = []
    for i, l in enumerate(plan.leaders):
        for f in plan.followers(i):
            for p in induced_paths(g, l, f):
                if len(p) % 2 == 0:
                    coeffs = {v: Fraction(1) for v in p}
                    coeffs[l] = Fraction(0)
                    coeffs = {v: c for v, c in coeffs.items() if c}
                    out.append(Inequality(coeffs, Fraction(len(p) // 2 - 1), kind="sst-path"))
    return out


def edge_inequalities(g: Graph) -> list[Inequality]:
    return [Inequality({u: Fraction(1), v: Fraction(1)}, Fraction(1), kind="edge") for u, v in g.edges()]


def _sst_rows(plan: SstPlan) -> list[Inequality]:
    return [c.inequality() for c in sst_cuts(plan)]


def _single_colored(g: Graph, plan: SstPlan) -> bool:
    red, _ = is_bipartite(g)
    return all(len({v in red for v in o}) == 1 for o in plan.orbits)


def _bipartite_cases(seed: int, count: int, max_n: int):
    rng = random.Random(seed)
    made = 0
    while made < count:
        g = inst.random_bipartite(rng.randint(2, max_n), rng)
        group = _group(g)
        if group.is_trivial():
            continue
        plan = random_plan(group, rng)
        made += 1
        yield made - 1, g, plan, rng


def suite_bipartite_hull(seed: int = 0, count: int = 50, objectives: int = 100,
                         max_n: int = 12) -> SuiteReport:
    rep = SuiteReport("bipartite-hull", seed)
    for t, g, plan, rng in _bipartite_cases(seed, count, max_n):
        base = edge_inequalities(g) + _sst_rows(plan)
        full = IneqSystem.from_inequalities(g.n, base + even_path_inequalities(g, plan))
        plain = IneqSystem.from_inequalities(g.n, base) if _single_colored(g, plan) else None
        bad = []
        for _ in range(objectives):
            c = [rng.randint(-4, 9) for _ in range(g.n)]
            want, _ = integer_hull_oracle(g, _sst_rows(plan), c)
            got = solve_lp(full, c).value
            if got != want:
                bad.append(f"objective {c}: LP {got} oracle {want}")
            if plain is not None and solve_lp(plain, c).value != want:
                bad.append(f"objective {c}: LP without path cuts differs from oracle {want}")
        rep.add(f"bipartite #{t} (n={g.n}, leaders {plan.leaders}"
                f"{', single-colored' if plain is not None else ''})", not bad,
                "" if not bad else bad[0] + "\n" + emit_dimacs(g) + plan.to_text())
    return rep


# ---------------------------------------------------------------------------
# extended formulation through the auxiliary graph


def chordless_odd_cycles(g: Graph) -> list[list[int]]:
    out = []
    for s in range(g.n):
        def grow(path: list[int]) -> None:
            u = path[-1]
            for w in sorted(g.adj[u]):
                if w <= s or w in path or any(w in g.adj[p] for p in path[1:-1]):
                    continue
                if len(path) > 1 and s in g.adj[w]:
                    if path[1] < w and (len(path) + 1) % 2 == 1:
                        out.append(path + [w])
                    continue
                path.append(w)
                grow(path)
                path.pop()
        grow([s])
    return out


def suite_extended(seed: int = 0, count: int = 50, objectives: int = 100,
                   max_n: int = 12) -> SuiteReport:
    """LP over the auxiliary graph with ``x_l + y_l = 1`` equals the oracle."""
    rep = SuiteReport("extended", seed)
    for t, g, plan, rng in _bipartite_cases(seed, count, max_n):
        aux, extra = build_auxiliary_graph(g, plan)
        rows = edge_inequalities(aux)
        rows += [Inequality({v: Fraction(1) for v in c}, Fraction((len(c) - 1) // 2), kind="odd-cycle")
                 for c in chordless_odd_cycles(aux)]
        eqs = [Inequality({l: Fraction(1), y: Fraction(1)}, Fraction(1), sense="==")
               for l, y in extra.items()]
        system = IneqSystem.from_inequalities(aux.n, rows + eqs)
        eq_pairs = [q for l, y in extra.items()
                    for q in (Inequality({l: Fraction(1), y: Fraction(1)}, Fraction(1)),
                              Inequality({l: Fraction(-1), y: Fraction(-1)}, Fraction(-1)))]
        bad, nonintegral = [], 0
        for _ in range(objectives):
            c = [rng.randint(-4, 9) for _ in range(g.n)]
            want, _ = integer_hull_oracle(g, _sst_rows(plan), c)
            got = solve_lp(system, c + [0] * (aux.n - g.n)).value
            integral, _ = best_stable_set(aux, c + [0] * (aux.n - g.n), eq_pairs)
            if got != integral:
                nonintegral += 1
                continue
            if got != want:
                bad.append(f"objective {c}: extended LP {got} oracle {want}")
        rep.add(f"auxiliary #{t} (n={g.n}, {len(extra)} leader nodes, {nonintegral} fractional)",
                not bad, "" if not bad else bad[0] + "\n" + emit_dimacs(g) + plan.to_text())
    return rep


# ---------------------------------------------------------------------------
# canonical representatives


def suite_canonical(seed: int = 0, count: int = 100, max_n: int = 10) -> SuiteReport:
    rep = SuiteReport("canonical", seed)
    rng = random.Random(seed)
    for t in range(count):
        n = rng.randint(1, max_n)
        g = Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.35])
        g = inst.orbit_weights(g, rng, classes=4, split=0.0)
        group = _group(g)
        plan = run_sst_algorithm(group, rng.choice(["min", "max", "first", "stringent"]))
        val, opt = best_stable_set(g, g.weights)
        x = [1 if v in opt else 0 for v in range(n)]
        y = canonicalize(x, group, plan)
        ys = [v for v in range(n) if y[v]]
        value = sum(g.weights[v] for v in ys)
        cuts_ok = all(c.inequality().satisfied_by(y) for c in sst_cuts(plan))
        ok = g.is_stable(ys) and cuts_ok and value == val
        rep.add(f"graph #{t} (n={n}, |G|={group.order()})", ok,
                "" if ok else f"x {x} -> {y}\n" + emit_dimacs(g) + plan.to_text())
    return rep


# ---------------------------------------------------------------------------
# 3-dimensional matching reduction


def has_matching(k: int, triples) -> bool:
    for sub in itertools.combinations(triples, k):
        if all(len({t[i] for t in sub}) == k for i in range(3)):
            return True
    return k == 0


def suite_reduction(seed: int = 0, count: int = 20) -> SuiteReport:
    rep = SuiteReport("reduction", seed)
    rng = random.Random(seed)
    for t in range(count):
        k = rng.randint(1, 2)
        triples = inst.random_3dm(k, rng.randint(1, min(4, k ** 3)), rng)
        red = reduction_3dm(k, triples)
        val, _ = best_stable_set(red.graph, red.weights, _sst_rows(red.plan))
        expect = has_matching(k, triples)
        ok = (val >= k) == expect
        rep.add(f"3DM #{t} (k={k}, T={triples}, matching={expect})", ok,
                "" if ok else f"oracle value {val}\n" + red.dump())
    return rep


# ---------------------------------------------------------------------------
# facets of single-leader SST clique cuts


def facet_instances(seed: int = 0, count: int = 10, max_n: int = 10):
    """Graphs with a leader whose orbit (under twin swaps) avoids its neighbourhood.

    Returns ``(graph, group, plan)`` triples; the group is generated by
    transpositions of the leader with false twins.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        twins = rng.randint(1, 3)
        base = rng.randint(2, max_n - twins)
        edges = [e for e in itertools.combinations(range(base), 2) if rng.random() < 0.4]
        l = rng.randrange(base)
        nb = {v for e in edges for v in e if l in e} - {l}
        n = base + twins
        for t in range(base, n):
            edges += [(min(u, t), max(u, t)) for u in nb]
        g = Graph.from_edges(n, edges)
        gens = [from_cycles([(l, t)], n) for t in range(base, n)]
        group = schreier_sims(gens, n)
        plan = plan_from_leaders(group, [l])
        out.append((g, group, plan))
    return out


def suite_facet(seed: int = 0, count: int = 10) -> SuiteReport:
    rep = SuiteReport("facet", seed)
    for t, (g, group, plan) in enumerate(facet_instances(seed, count)):
        l = plan.leaders[0]
        fol = plan.followers(0)
        sub, ids = g.induced_subgraph(fol)
        cliques = [tuple(ids[j] for j in c) for c in maximal_cliques(sub)]
        pts = [[(m >> v) & 1 for v in range(g.n)] for m in feasible_stable_sets(g, _sst_rows(plan))]
        dim = affine_rank(pts)
        for c in cliques:
            cut = SstCliqueCut(l, c).inequality()
            tight = [p for p in pts if cut.violation(p) == 0]
            r = affine_rank(tight) if tight else -1
            rep.add(f"instance #{t} (n={g.n}, leader {l}, clique {list(c)})", r == dim - 1,
                    f"dim {dim}, tight rank {r}" if r != dim - 1 else "")
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "presolve": suite_presolve,
    "tu": suite_tu,
    "network": suite_network,
    "bipartite-hull": suite_bipartite_hull,
    "extended": suite_extended,
    "canonical": suite_canonical,
    "reduction": suite_reduction,
    "facet": suite_facet,
}
