"""Command line entry point: generate, inspect, solve, bench, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Node ids on the command line and in output are 1-based, as in DIMACS.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Sequence

from . import instances as inst
from .benchmark import load_instance, run_benchmark
from .graph import DimacsError, Graph, complement, emit_dimacs, emit_weights, parse_weights
from .permgroup import cycles, read_generators
from .polyhedra import extend_for_theorem, is_totally_unimodular
from .solver import SETTINGS, Settings, branch_and_cut, symmetry_group, with_overrides
from .sst import (LeaderPolicy, deleted_nodes, is_stringent, plan_from_leaders, presolve,
                  reduction_3dm, run_sst_algorithm, sst_clique_cuts)
from .verify import SUITES

log = logging.getLogger("ssttool")


class UsageError(Exception):
    pass


def _ids(nodes) -> str:
    return "{" + ",".join(str(v + 1) for v in sorted(nodes)) + "}"


def _load(spec: str, use_complement: bool = False, weights: str | None = None) -> Graph:
    path = Path(spec)
    if not path.exists() and spec in inst.BUILTINS:
        g = inst.BUILTINS[spec]()
        g = complement(g) if use_complement else g
    else:
        try:
            g = load_instance(path, use_complement)
        except OSError as exc:
            raise UsageError(f"cannot read {spec}: {exc}") from None
    if weights:
        g = g.with_weights(parse_weights(Path(weights).read_text(), g.n))
    return g


def _generators(path: str | None, n: int):
    if path is None:
        return None
    return read_generators(Path(path).read_text(), n, base=1)


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# generate


def cmd_generate(a) -> int:
    rng = random.Random(a.seed)
    kind = a.kind
    params: dict = {"seed": a.seed}
    weights = None
    if kind == "tp":
        params["n"] = a.n
        g = inst.random_tp(a.n, rng)
    elif kind == "bipartite":
        params["n"] = a.n
        g = inst.random_bipartite(a.n, rng, p=a.p)
    elif kind == "cycle":
        params["n"] = a.n
        g = inst.cycle(a.n)
    elif kind == "disjoint-cliques":
        params.update(m=a.m, count=a.count)
        g = inst.disjoint_cliques(a.m, a.count)
    elif kind == "3dm":
        params["k"] = a.k
        triples = inst.random_3dm(a.k, a.triples, rng)
        params["triples"] = [list(t) for t in triples]
        red = reduction_3dm(a.k, triples)
        g = red.graph
        weights = red.weights
    else:
        params["name"] = kind
        g = inst.BUILTINS[kind]()
    if a.weight_classes and weights is None:
        g = inst.orbit_weights(g, rng, a.weight_classes)
    man = inst.manifest(g, kind, params)
    problems = inst.check_manifest(man)
    if problems:
        log.error("generated instance violates its manifest: %s", "; ".join(problems))
        return 1
    _write(emit_dimacs(g, f"generated {kind} {json.dumps(params)}"), a.out)
    if a.out not in (None, "-"):
        stem = Path(a.out)
        if any(w != 1 for w in g.weights):
            stem.with_suffix(".weights").write_text(emit_weights(g))
        stem.with_suffix(".json").write_text(json.dumps(man, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# inspect


def cmd_inspect(a) -> int:
    g = _load(a.graph, a.complement, a.weights)
    gens = _generators(a.generators, g.n)
    group = symmetry_group(g, gens)
    print(f"graph: {g.n} nodes, {g.m} edges; |group| = {group.order()}")
    if group.is_trivial():
        print("no nontrivial symmetry")
        return 0
    for p in group.strong_gens:
        print("generator " + "".join("(" + ",".join(str(v + 1) for v in c) + ")" for c in cycles(p)))
    leaders = [int(t) - 1 for t in a.leaders.split(",")] if a.leaders else None
    if a.presolve:
        _, plan, report = presolve(g, group, a.policy, not a.no_add_edges, leaders)
        print(f"presolve: deleted {_ids(report.deleted)}, added "
              + "{" + ",".join(_ids(e) for e in report.added_edges) + "}"
              + f", {report.rounds} rounds")
    elif leaders is not None:
        plan = plan_from_leaders(group, leaders)
    else:
        plan = run_sst_algorithm(group, a.policy)
    for i, l in enumerate(plan.leaders):
        fol = plan.followers(i)
        print(f"leader {l + 1} orbit {_ids(plan.orbits[i])}: {len(fol)} cuts"
              + ("" if not fol else " " + " ".join(f"x{f + 1}<=x{l + 1}" for f in fol)))
    print(f"total: {len(plan.leaders)} leaders, {plan.num_cuts} cuts")
    gone = deleted_nodes(g, plan)
    if gone:
        print(f"followers adjacent to their leader: {_ids(gone)}")
    if a.clique_cuts:
        for c in sst_clique_cuts(plan, g):
            print(f"clique cut: {' + '.join(f'x{f + 1}' for f in c.clique)} <= x{c.leader + 1}")
    print("stringent: " + ("yes" if is_stringent(plan, group) else "no"))
    if a.tu:
        m = extend_for_theorem(g, plan)
        v = is_totally_unimodular(m)
        print("extended clique matrix: " + _one_based_verdict(v, m))
    return 0


def _one_based_verdict(v, m) -> str:
    if v.is_tu:
        return "TU" if v.exact else "no violation found (sampled)"
    rows, cols, det = v.witness
    return (f"NOT TU, witness rows {[_label(m.row_labels[i]) for i in rows]} "
            f"cols {[m.col_labels[j] + 1 for j in cols]} det {det}")


def _label(lab) -> str:
    kind = lab[0]
    if kind == "clique":
        return "clique" + _ids(lab[1])
    return f"sst-clique(leader {lab[1] + 1}, {_ids(lab[2])})"


# ---------------------------------------------------------------------------
# solve


def _settings_from_args(a) -> Settings:
    s = Settings.named(a.setting)
    cuts = {"none": (False, False), "sst": (True, False), "clique": (False, True),
            "both": (True, True)}.get(a.cuts, (None, None))
    return with_overrides(
        s,
        policy=LeaderPolicy(a.policy) if a.policy else None,
        presolve=True if a.presolve else None,
        add_edges=False if a.no_add_edges else None,
        sst_cuts=cuts[0], sst_clique_cuts=cuts[1],
        path_cuts=True if a.path_cuts else None,
        resymmetrize=True if a.resymmetrize else None)


def cmd_solve(a) -> int:
    g = _load(a.file, a.complement, a.weights)
    settings = _settings_from_args(a)
    if settings.uses_symmetry and settings.policy is None:
        settings = with_overrides(settings, policy=LeaderPolicy.STRINGENT)
    res = branch_and_cut(g, settings, cutoff=a.cutoff, time_limit=a.time_limit,
                         generators=_generators(a.generators, g.n))
    print(f"setting: {settings.name}  seed: {a.seed}")
    print(f"status: {res.status}")
    print(f"optimum: {res.optimum}")
    print(f"incumbent: {_ids(res.incumbent)}")
    print(f"nodes: {res.nodes}")
    print(f"time: {res.time:.3f}s")
    if res.presolve is not None:
        p = res.presolve
        print(f"presolve: deleted {_ids(p.deleted)}, added "
              + "{" + ",".join(_ids(e) for e in p.added_edges) + "}")
    print(f"leaders: {res.leaders}  followers: {res.followers}")
    print("cuts: " + ", ".join(f"{k}={v}" for k, v in sorted(res.cuts_added.items())))
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(a) -> int:
    files: list = []
    for item in a.instances:
        p = Path(item)
        if not p.exists() and item in inst.BUILTINS:
            g = inst.BUILTINS[item]()
            files.append((item, complement(g) if a.complement else g))
        elif p.is_dir():
            files += sorted(str(f) for f in p.iterdir() if f.suffix in (".col", ".dimacs", ".clq", ".txt"))
        elif p.suffix == ".list":
            files += [ln.strip() for ln in p.read_text().splitlines() if ln.strip()]
        else:
            files.append(item)
    names = list(SETTINGS) if a.settings == "all" else a.settings.split(",")
    for s in names:
        if s not in SETTINGS:
            raise UsageError(f"unknown setting {s!r}")
    report = run_benchmark(files, names, a.time_limit, a.threads, a.complement)
    sys.stdout.write(report.to_text())
    if a.out:
        Path(a.out).write_text(report.to_csv())
    if a.runs_out:
        Path(a.runs_out).write_text(report.runs_csv())
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(a) -> int:
    if a.instance:
        if a.suite != "tu":
            raise UsageError("--instance is only supported by the tu suite")
        g = _load(a.instance)
        group = symmetry_group(g)
        if a.leaders:
            plan = plan_from_leaders(group, [int(t) - 1 for t in a.leaders.split(",")])
        else:
            plan = run_sst_algorithm(group, a.policy or "stringent")
        m = extend_for_theorem(g, plan)
        print(f"leaders {[l + 1 for l in plan.leaders]} stringent: "
              f"{'yes' if is_stringent(plan, group) else 'no'}")
        print(_one_based_verdict(is_totally_unimodular(m), m))
        return 0
    kw = {"seed": a.seed}
    if a.count is not None:
        if a.suite == "presolve":
            raise UsageError("the presolve suite has a single case")
        kw["count"] = a.count
    report = SUITES[a.suite](**kw)
    print(report.text(verbose=a.verbose))
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ssttool", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    quiet = argparse.ArgumentParser(add_help=False)
    quiet.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    g = sub.add_parser("generate", parents=[quiet], help="write a generated or built-in instance")
    g.add_argument("kind", choices=["tp", "bipartite", "cycle", "3dm", "disjoint-cliques"] + list(inst.BUILTINS))
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--p", type=float, default=0.3, help="extra edge probability (bipartite)")
    g.add_argument("--m", type=int, default=3, help="clique size (disjoint-cliques)")
    g.add_argument("--count", type=int, default=2, help="number of cliques (disjoint-cliques)")
    g.add_argument("--k", type=int, default=1, help="ground set size (3dm)")
    g.add_argument("--triples", type=int, default=2, help="number of triples (3dm)")
    g.add_argument("--weight-classes", type=int, default=0, help="orbit-constant random weights")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)

    def common(p):
        p.add_argument("--complement", action="store_true", help="use the complement graph")
        p.add_argument("--weights", help="weights file (w <node> <int> lines)")
        p.add_argument("--generators", help="symmetry generators file instead of automorphism search")
        p.add_argument("--policy", choices=[x.value for x in LeaderPolicy])
        p.add_argument("--presolve", action="store_true")
        p.add_argument("--no-add-edges", action="store_true")

    i = sub.add_parser("inspect", parents=[quiet], help="print symmetry group and SST plan")
    i.add_argument("graph")
    common(i)
    i.add_argument("--leaders", help="comma-separated leader sequence")
    i.add_argument("--clique-cuts", action="store_true")
    i.add_argument("--tu", action="store_true", help="check the extended clique matrix for TU")
    i.set_defaults(func=cmd_inspect, policy=None)

    s = sub.add_parser("solve", parents=[quiet], help="branch-and-cut for maximum-weight stable set")
    s.add_argument("file")
    s.add_argument("--setting", default="default", choices=list(SETTINGS))
    s.add_argument("--cutoff", type=int)
    s.add_argument("--time-limit", type=float)
    s.add_argument("--seed", type=int, default=0)
    common(s)
    s.add_argument("--cuts", choices=["none", "sst", "clique", "both"])
    s.add_argument("--path-cuts", action="store_true")
    s.add_argument("--resymmetrize", action="store_true")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", parents=[quiet], help="run settings over instances")
    b.add_argument("instances", nargs="+", help="files, directories or .list files")
    b.add_argument("--settings", default="all")
    b.add_argument("--time-limit", type=float)
    b.add_argument("--threads", type=int)
    b.add_argument("--complement", action="store_true")
    b.add_argument("--out", help="summary CSV")
    b.add_argument("--runs-out", help="per-run CSV")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", parents=[quiet], help="run a verification suite")
    v.add_argument("suite", choices=list(SUITES))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int)
    v.add_argument("--instance", help="single built-in or file (tu suite)")
    v.add_argument("--leaders", help="comma-separated leaders for --instance")
    v.add_argument("--policy", choices=[x.value for x in LeaderPolicy])
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(a, "policy", None) is None and a.command == "inspect":
        a.policy = "min"
    try:
        return a.func(a)
    except (UsageError, DimacsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
