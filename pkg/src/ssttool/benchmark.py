"""Run settings over instance sets and summarise them per setting."""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import gmpy2

from .graph import Graph, complement, parse_dimacs, parse_weights
from .solver import Settings, branch_and_cut

log = logging.getLogger(__name__)

TIME_SHIFT = 1
NODE_SHIFT = 100


def _exact_root(q: Fraction, n: int) -> Fraction | None:
    if q < 0:
        return None
    rn, ok_n = gmpy2.iroot(gmpy2.mpz(q.numerator), n)
    rd, ok_d = gmpy2.iroot(gmpy2.mpz(q.denominator), n)
    return Fraction(int(rn), int(rd)) if ok_n and ok_d else None


def shifted_geometric_mean(values: Sequence, shift) -> Fraction | float:
    """``(prod (v + shift))**(1/n) - shift``.

    The result is an exact ``Fraction`` whenever the product is a perfect
    ``n``-th power of a rational; otherwise it is a float.
    """
    vals = [Fraction(v) for v in values]
    if not vals:
        raise ValueError("shifted geometric mean of no values")
    s = Fraction(shift)
    prod = Fraction(1)
    for v in vals:
        if v + s <= 0:
            raise ValueError("every value plus the shift must be positive")
        prod *= v + s
    root = _exact_root(prod, len(vals))
    if root is not None:
        return root - s
    return float(prod) ** (1.0 / len(vals)) - float(s)


@dataclass
class RunRecord:
    instance: str
    setting: str
    status: str
    optimum: int | None
    time: float
    nodes: int
    presolve_fixed: int
    presolve_edges: int
    presolve_time: float
    leaders: int
    followers: int


@dataclass
class BenchmarkReport:
    runs: list[RunRecord]
    settings: list[str]
    skipped: list[str]

    def summary(self) -> list[dict]:
        out = []
        for name in self.settings:
            rs = [r for r in self.runs if r.setting == name]
            if not rs:
                continue
            k = len(rs)
            out.append({
                "setting": name,
                "instances": k,
                "opt": sum(r.status == "optimal" for r in rs),
                "sgm_time": float(shifted_geometric_mean([Fraction(r.time) for r in rs], TIME_SHIFT)),
                "sgm_nodes": float(shifted_geometric_mean([r.nodes for r in rs], NODE_SHIFT)),
                "fixed": sum(r.presolve_fixed for r in rs) / k,
                "edges": sum(r.presolve_edges for r in rs) / k,
                "presolve_time": sum(r.presolve_time for r in rs) / k,
                "leaders": sum(r.leaders for r in rs) / k,
                "followers": sum(r.followers for r in rs) / k,
            })
        return out

    def to_csv(self) -> str:
        rows = self.summary()
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()

    def runs_csv(self) -> str:
        buf = io.StringIO()
        if self.runs:
            w = csv.DictWriter(buf, fieldnames=list(asdict(self.runs[0])))
            w.writeheader()
            w.writerows(asdict(r) for r in self.runs)
        return buf.getvalue()

    def to_text(self) -> str:
        head = ["setting", "#opt", "time", "nodes", "#fixed", "#edges", "pre-time", "|L|", "|S(L)|"]
        body = [[r["setting"], str(r["opt"]), f"{r['sgm_time']:.2f}", f"{r['sgm_nodes']:.1f}",
                 f"{r['fixed']:.1f}", f"{r['edges']:.1f}", f"{r['presolve_time']:.2f}",
                 f"{r['leaders']:.1f}", f"{r['followers']:.1f}"] for r in self.summary()]
        widths = [max(len(row[i]) for row in [head] + body) for i in range(len(head))]
        def fmt(row):
            return "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))

        return "\n".join([fmt(head)] + [fmt(r) for r in body]) + "\n"


def load_instance(path: str | Path, use_complement: bool = False) -> Graph:
    """DIMACS file plus an optional weights sidecar (same stem, ``.weights``)."""
    p = Path(path)
    g = parse_dimacs(p.read_text())
    side = p.with_suffix(".weights")
    if side.exists():
        g = g.with_weights(parse_weights(side.read_text(), g.n))
    return complement(g) if use_complement else g


def _run(job) -> RunRecord:
    name, g, setting, time_limit = job
    res = branch_and_cut(g, Settings.named(setting), time_limit=time_limit)
    pre = res.presolve
    return RunRecord(name, setting, res.status, res.optimum, res.time, res.nodes,
                     len(pre.deleted) if pre else 0, len(pre.added_edges) if pre else 0,
                     res.presolve_time, res.leaders, res.followers)


def thread_cap() -> int:
    env = os.environ.get("SSTTOOL_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer SSTTOOL_THREADS=%r", env)
    return os.cpu_count() or 1


def run_benchmark(instances: Iterable, settings_list: Sequence[str], time_limit: float | None = None,
                  threads: int | None = None, use_complement: bool = False) -> BenchmarkReport:
    """Solve every instance under every setting.

    ``instances`` holds file paths or ``(name, Graph)`` pairs; unreadable
    files are skipped with a warning.  Runs may execute in parallel, capped by
    ``threads`` or ``SSTTOOL_THREADS``; the report order does not depend on
    scheduling.
    """
    for s in settings_list:
        Settings.named(s)
    graphs: list[tuple[str, Graph]] = []
    skipped: list[str] = []
    for item in instances:
        if isinstance(item, tuple):
            graphs.append(item)
            continue
        try:
            graphs.append((str(item), load_instance(item, use_complement)))
        except (OSError, ValueError) as exc:
            log.warning("skipping %s: %s", item, exc)
            skipped.append(str(item))
    jobs = [(name, g, s, time_limit) for name, g in graphs for s in settings_list]
    workers = min(threads or thread_cap(), len(jobs)) if jobs else 1
    if workers <= 1:
        runs = [_run(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run, jobs))
    return BenchmarkReport(runs, list(settings_list), skipped)
