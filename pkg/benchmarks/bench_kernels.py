"""Compare the numba-compiled kernels with the pure Python/numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]

Each path runs in its own subprocess, the fallback one with
``SSTTOOL_DISABLE_NUMBA=1``, so the fallback timings include no compiled
helper.  Kernel outputs from both paths are compared before the table is
printed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import subprocess
import random
import sys
import time

import numpy as np

from ssttool import _kernels as K
from ssttool.graph import cover_labels
from ssttool.instances import cycle, random_bipartite


def best_of(fn, args, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return out, best


def stable_case(seed):
    g = random_bipartite(34, random.Random(seed), p=0.15)
    indptr, indices = g.csr()
    w = np.array([1 + (7 * v) % 5 for v in range(g.n)], dtype=np.int64)
    rows = np.zeros((0, g.n), dtype=np.int64)
    return (indptr, indices, w, rows, np.zeros(0, dtype=np.int64),
            np.asarray(cover_labels(g), dtype=np.int64))


def enum_case():
    g = cycle(18)
    indptr, indices = g.csr()
    rows = np.ones((1, g.n), dtype=np.int64)
    return indptr, indices, g.n, rows, np.array([6], dtype=np.int64)


def tu_case(seed, cols=15, rows=40):
    # interval (consecutive-ones) matrix: TU, so every column subset is visited
    rng = random.Random(seed)
    M = np.zeros((rows, cols), dtype=np.int64)
    for i in range(rows):
        a = rng.randrange(cols)
        b = rng.randrange(a, cols)
        M[i, a:b + 1] = 1
    return (M,)


def det_case(seed):
    rng = np.random.default_rng(seed)
    return (rng.integers(-1, 2, size=(14, 14)).astype(np.int64),)


def measure(seed: int, repeat: int) -> dict:
    cases = {
        "max_weight_stable": (K.max_weight_stable, stable_case(seed)),
        "enumerate_stable_sets": (K.enumerate_stable_sets, enum_case()),
        "first_failing_subset": (K.first_failing_subset, tu_case(seed)),
        "bareiss_det": (K.bareiss_det, det_case(seed)),
    }
    out = {}
    for name, (fn, call) in cases.items():
        if K.JIT_ENABLED:
            fn(*call)  # compile outside the timing
        res, t = best_of(fn, call, repeat)
        digest = hashlib.sha1(repr([np.asarray(x).tolist() for x in _tuple(res)]).encode()).hexdigest()
        out[name] = {"time": t, "digest": digest}
    return {"jit": K.JIT_ENABLED, "kernels": out}


def _tuple(x):
    return x if isinstance(x, tuple) else (x,)


def _child(disable: bool, seed: int, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("SSTTOOL_DISABLE_NUMBA", None)
    if disable:
        env["SSTTOOL_DISABLE_NUMBA"] = "1"
    cmd = [sys.executable, __file__, "--child", "--seed", str(seed), "--repeat", str(repeat)]
    return json.loads(subprocess.run(cmd, env=env, check=True, capture_output=True, text=True).stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="numba vs fallback kernel timings")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.child:
        print(json.dumps(measure(args.seed, args.repeat)))
        return 0

    fast = _child(False, args.seed, args.repeat)
    slow = _child(True, args.seed, 1)
    if not fast["jit"]:
        print("numba is not available; only the fallback path exists")
    print(f"{'kernel':24} {'jit [s]':>10} {'fallback [s]':>13} {'speedup':>9}")
    ok = True
    for name, a in fast["kernels"].items():
        b = slow["kernels"][name]
        same = a["digest"] == b["digest"]
        ok &= same
        print(f"{name:24} {a['time']:10.4f} {b['time']:13.4f} {b['time'] / max(a['time'], 1e-9):8.1f}x"
              + ("" if same else "  MISMATCH"))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
