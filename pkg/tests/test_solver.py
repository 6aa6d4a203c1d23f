import itertools
import random
from fractions import Fraction

import pytest

from ssttool.graph import Graph
from ssttool.instances import c8, cycle, fig4, fig6, orbit_weights, random_bipartite, random_tp
from ssttool.permgroup import from_cycles
from ssttool.solver import (SETTINGS, Settings, _separate_cliques, _separate_sst_cliques,
                            branch_and_cut, neighborhood_cuts, symmetry_group, with_overrides)
from ssttool.sst import LeaderPolicy, feasible_stable_sets, run_sst_algorithm, sst_cuts

STR, MIN, MAX = LeaderPolicy.STRINGENT, LeaderPolicy.MIN, LeaderPolicy.MAX

# name -> (policy, presolve, add_edges, sst_cuts, sst_clique_cuts, resymmetrize)
EXPECTED = {
    "default": (None, False, True, False, False, False),
    "SST-pre-min": (MIN, True, True, False, False, False),
    "SST-pre-max": (MAX, True, True, False, False, False),
    "SST-pre-str": (STR, True, True, False, False, False),
    "SST-pre-str-ne": (STR, True, False, False, False, False),
    "SSTC-min": (MIN, False, True, True, False, False),
    "SSTC-max": (MAX, False, True, True, False, False),
    "SSTC-str": (STR, False, True, True, False, False),
    "SSTCC": (STR, False, True, False, True, False),
    "SSTCCC": (STR, False, True, True, True, False),
    "SSTCC-pre-str": (STR, True, True, False, True, True),
}


def test_settings_table_is_total():
    assert list(SETTINGS) == list(EXPECTED)
    for name, flags in EXPECTED.items():
        s = SETTINGS[name]
        assert (s.policy, s.presolve, s.add_edges, s.sst_cuts, s.sst_clique_cuts, s.resymmetrize) == flags
        assert s.uses_symmetry == (name != "default")


def test_unknown_setting_and_overrides():
    with pytest.raises(ValueError, match="unknown setting"):
        Settings.named("SSTX")
    base = Settings.named("SSTC-str")
    assert with_overrides(base, sst_cuts=True) is base
    custom = with_overrides(base, path_cuts=True)
    assert custom.name == "custom" and custom.path_cuts and custom.sst_cuts


def brute_opt(g):
    best = 0
    for k in range(1, g.n + 1):
        for s in itertools.combinations(range(g.n), k):
            if g.is_stable(s):
                best = max(best, sum(g.weights[v] for v in s))
    return best


def small_corpus():
    rng = random.Random(5)
    out = [c8(), fig4(), fig6(), cycle(7), cycle(9)]
    for _ in range(6):
        out.append(orbit_weights(random_tp(rng.randint(4, 13), rng), rng))
        out.append(orbit_weights(random_bipartite(rng.randint(4, 13), rng), rng))
    for _ in range(4):
        n = rng.randint(4, 12)
        g = Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.3])
        out.append(orbit_weights(g, rng))
    return out


@pytest.mark.parametrize("name", list(SETTINGS) + ["path"])
def test_optimum_matches_brute_force(name):
    settings = with_overrides(Settings.named("SSTC-str"), path_cuts=True) if name == "path" else Settings.named(name)
    for g in small_corpus():
        res = branch_and_cut(g, settings)
        want = brute_opt(g)
        assert res.status == "optimal"
        assert res.optimum == want, (name, g)
        assert g.is_stable(res.incumbent) and sum(g.weights[v] for v in res.incumbent) == want
        assert res.root_bound >= want and res.bound == want


def test_negative_weights_default():
    g = cycle(6).with_weights([3, -1, 2, -5, 4, 0])
    assert branch_and_cut(g).optimum == brute_opt(g)


def test_presolve_report_on_c8():
    res = branch_and_cut(c8(), "SST-pre-str")
    assert res.optimum == 4 and res.nodes == 1
    assert res.presolve is not None and res.presolve.rounds >= 1
    assert res.leaders >= 1 and res.followers >= 1


def test_cutoff_semantics():
    g = cycle(7)
    assert branch_and_cut(g, cutoff=3).optimum == 3
    res = branch_and_cut(g, cutoff=4)
    assert res.status == "cutoff" and res.optimum is None


def test_time_limit_reports_bound():
    g = cycle(11)
    res = branch_and_cut(g, time_limit=0.0)
    assert res.status == "time-limit"
    assert res.bound is None or res.bound >= 5


def test_user_generators_checked():
    g = c8()
    res = branch_and_cut(g, "SSTC-str", generators=[from_cycles([(1, 7), (2, 6), (3, 5)], 8)])
    assert res.optimum == 4
    assert symmetry_group(g, [from_cycles([(1, 7), (2, 6), (3, 5)], 8)]).order() == 2
    with pytest.raises(ValueError, match="automorphism"):
        symmetry_group(g, [from_cycles([(0, 1)], 8)])
    with pytest.raises(ValueError, match="degree"):
        symmetry_group(g, [(1, 0)])


def test_non_integer_weights_rejected():
    g = Graph(2, (frozenset(), frozenset()), (1, 1.5))
    with pytest.raises(ValueError, match="integers"):
        branch_and_cut(g)


# ------------------------------------------------------------------ cut validity


def stable_points(g, ineqs=()):
    return [[(m >> v) & 1 for v in range(g.n)] for m in feasible_stable_sets(g, ineqs)]


@pytest.mark.parametrize("seed", range(15))
def test_separated_cuts_are_valid_and_violated(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 12)
    g = Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.4])
    x = [Fraction(rng.randint(0, 4), 4) for _ in range(n)]
    pts = stable_points(g)
    for q in _separate_cliques(g, x, set()):
        assert q.violation(x) > 0
        assert all(q.satisfied_by(p) for p in pts)
    for q in neighborhood_cuts(g):
        assert all(q.satisfied_by(p) for p in pts)


@pytest.mark.parametrize("seed", range(15))
def test_sst_clique_separation_valid_for_cut_polytope(seed):
    rng = random.Random(seed)
    g = orbit_weights(random_tp(rng.randint(4, 12), rng), rng)
    group = symmetry_group(g)
    plan = run_sst_algorithm(group, "stringent")
    pts = stable_points(g, [c.inequality() for c in sst_cuts(plan)])
    x = [Fraction(rng.randint(0, 4), 4) for _ in range(g.n)]
    for q in _separate_sst_cliques(g, plan, x, set(), set()):
        assert q.violation(x) > 0
        assert all(q.satisfied_by(p) for p in pts)


@pytest.mark.parametrize("seed", range(10))
def test_stringent_cuts_close_tp_root(seed):
    rng = random.Random(100 + seed)
    g = orbit_weights(random_tp(rng.randint(6, 20), rng), rng)
    res = branch_and_cut(g, "SSTC-str")
    assert res.nodes == 1 and res.root_bound == res.optimum
