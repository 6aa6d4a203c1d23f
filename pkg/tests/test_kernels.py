"""Compiled kernels against their pure Python/numpy fallbacks."""

import os
import random
import subprocess
import sys

import numpy as np
import pytest

from ssttool import _kernels as K
from ssttool.graph import Graph, cover_labels


def random_case(seed, n=None, rows=2):
    rng = random.Random(seed)
    n = n or rng.randint(1, 12)
    g = Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3])
    indptr, indices = g.csr()
    w = np.array([rng.randint(-3, 9) for _ in range(n)], dtype=np.int64)
    A = np.array([[rng.randint(-1, 1) for _ in range(n)] for _ in range(rows)], dtype=np.int64).reshape(rows, n)
    b = np.array([rng.randint(0, 2) for _ in range(rows)], dtype=np.int64)
    return g, indptr, indices, w, A, b


@pytest.mark.parametrize("seed", range(40))
def test_max_weight_stable_paths_agree(seed):
    g, indptr, indices, w, A, b = random_case(seed)
    cover = cover_labels(g)
    fast = K.max_weight_stable(indptr, indices, w, A, b, cover)
    slow = K.max_weight_stable_py(indptr, indices, w, A, b, cover)
    assert fast[0] == slow[0] and fast[1] == slow[1]
    assert np.array_equal(fast[2], slow[2])


@pytest.mark.parametrize("seed", range(40))
def test_enumeration_paths_agree(seed):
    g, indptr, indices, _, A, b = random_case(seed)
    want = K.enumerate_stable_sets_py(indptr, indices, g.n, A, b)
    assert np.array_equal(K.enumerate_stable_sets_numpy(indptr, indices, g.n, A, b), want)
    assert np.array_equal(K.enumerate_stable_sets(indptr, indices, g.n, A, b), want)


def test_enumeration_numpy_crosses_block_boundary():
    n = 17  # 2**17 masks: two blocks of 2**16
    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    indptr, indices = g.csr()
    A = np.zeros((0, n), dtype=np.int64)
    b = np.zeros(0, dtype=np.int64)
    got = K.enumerate_stable_sets_numpy(indptr, indices, n, A, b)
    # stable sets of a path on n nodes: Fibonacci(n + 2)
    fib = [0, 1]
    while len(fib) < n + 3:
        fib.append(fib[-1] + fib[-2])
    assert len(got) == fib[n + 2]


@pytest.mark.parametrize("seed", range(40))
def test_tu_search_paths_agree(seed):
    rng = np.random.default_rng(seed)
    M = rng.choice([-1, 0, 0, 1], size=(rng.integers(1, 7), rng.integers(1, 7))).astype(np.int64)
    a = int(K.first_failing_subset(M))
    assert a == int(K.first_failing_subset_py(M)) == int(K._first_failing_subset_interp(M))
    if a >= 0:
        sel = np.array([j for j in range(M.shape[1]) if (a >> j) & 1], dtype=np.int64)
        cand = np.arange(M.shape[0], dtype=np.int64)
        r1, d1 = K.find_bad_minor(M, sel, cand)
        r2, d2 = K.find_bad_minor_py(M, sel, cand)
        assert list(r1) == list(r2) and d1 == d2 and abs(d1) >= 2


@pytest.mark.parametrize("seed", range(30))
def test_bareiss_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, 10))
    A = rng.integers(-1, 2, size=(k, k)).astype(np.int64)
    want = round(np.linalg.det(A)) if k else 1
    assert int(K.bareiss_det(A)) == int(K.bareiss_det_py(A)) == want


def test_fallback_flag_disables_jit():
    code = ("import ssttool, ssttool._kernels as K;"
            "from ssttool.solver import branch_and_cut;"
            "from ssttool.instances import fig4;"
            "print(ssttool.JIT_ENABLED, K.enumerate_stable_sets is K.enumerate_stable_sets_numpy,"
            " branch_and_cut(fig4(), 'SSTCC').optimum)")
    env = dict(os.environ, SSTTOOL_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True", "6"]
