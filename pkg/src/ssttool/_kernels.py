"""Integer inner loops: stable-set search, TU subset search, Bareiss determinants.

Every kernel is written once as plain Python over numpy arrays.  When numba is
importable and ``SSTTOOL_DISABLE_NUMBA`` is unset, the public names are bound
to ``numba.njit`` compiled versions; otherwise the interpreted source runs
as-is, except for ``enumerate_stable_sets`` whose fallback is a vectorised
numpy sweep over all bitmasks.

The ``*_py`` names always refer to the uncompiled functions so that the
benchmark and the tests can compare both paths in one process.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

_FLAG = os.environ.get("SSTTOOL_DISABLE_NUMBA", "").strip().lower()
JIT_ENABLED = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def _jit(fn):
    if JIT_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# maximum weight stable set with extra integer rows, depth first


def max_weight_stable_py(indptr, indices, weight, rows, rhs, cover):
    """Branch and bound over binary stable sets subject to ``rows @ x <= rhs``.

    Nodes are decided in index order, include before exclude, and the
    incumbent is replaced only on strict improvement.  The returned argmax is
    therefore the lexicographically largest optimal indicator vector.
    ``cover`` assigns every node to a clique of a clique cover; the bound sums
    the best remaining positive weight per cover clique.

    Returns ``(found, best_value, best_x)``.
    """
    n = weight.shape[0]
    m = rows.shape[0]
    ncl = 0
    for j in range(n):
        if cover[j] + 1 > ncl:
            ncl = cover[j] + 1
    negsuf = np.zeros((m, n + 1), dtype=np.int64)
    for r in range(m):
        for j in range(n - 1, -1, -1):
            a = rows[r, j]
            negsuf[r, j] = negsuf[r, j + 1] + (a if a < 0 else 0)

    forb = np.zeros(n, dtype=np.int64)
    x = np.zeros(n, dtype=np.int8)
    best_x = np.zeros(n, dtype=np.int8)
    rowsum = np.zeros(m, dtype=np.int64)
    state = np.zeros(n + 1, dtype=np.int64)
    clbest = np.zeros(max(ncl, 1), dtype=np.int64)
    found = False
    best = 0
    val = 0
    k = 0
    while k >= 0:
        if k == n:
            ok = True
            for r in range(m):
                if rowsum[r] > rhs[r]:
                    ok = False
                    break
            if ok and (not found or val > best):
                found = True
                best = val
                for j in range(n):
                    best_x[j] = x[j]
            k -= 1
            continue
        st = state[k]
        if st == 0:
            prune = False
            for r in range(m):
                if rowsum[r] + negsuf[r, k] > rhs[r]:
                    prune = True
                    break
            if not prune and found:
                for c in range(ncl):
                    clbest[c] = 0
                for j in range(k, n):
                    if forb[j] == 0 and weight[j] > clbest[cover[j]]:
                        clbest[cover[j]] = weight[j]
                bnd = val
                for c in range(ncl):
                    bnd += clbest[c]
                if bnd <= best:
                    prune = True
            if prune:
                k -= 1
                continue
            state[k] = 1
            if forb[k] == 0:
                x[k] = 1
                val += weight[k]
                for r in range(m):
                    rowsum[r] += rows[r, k]
                for p in range(indptr[k], indptr[k + 1]):
                    forb[indices[p]] += 1
            else:
                state[k] = 2
            k += 1
        elif st == 1:
            if x[k] == 1:
                x[k] = 0
                val -= weight[k]
                for r in range(m):
                    rowsum[r] -= rows[r, k]
                for p in range(indptr[k], indptr[k + 1]):
                    forb[indices[p]] -= 1
            state[k] = 2
            k += 1
        else:
            state[k] = 0
            k -= 1
    return found, best, best_x


max_weight_stable = _jit(max_weight_stable_py)


# ---------------------------------------------------------------------------
# enumeration of all feasible binary stable sets (small n only)


def enumerate_stable_sets_py(indptr, indices, n, rows, rhs):
    """All stable-set bitmasks satisfying ``rows @ x <= rhs``, ascending."""
    m = rows.shape[0]
    negsuf = np.zeros((m, n + 1), dtype=np.int64)
    for r in range(m):
        for j in range(n - 1, -1, -1):
            a = rows[r, j]
            negsuf[r, j] = negsuf[r, j + 1] + (a if a < 0 else 0)
    cap = 1024
    out = np.empty(cap, dtype=np.int64)
    cnt = 0
    forb = np.zeros(n, dtype=np.int64)
    x = np.zeros(n, dtype=np.int8)
    rowsum = np.zeros(m, dtype=np.int64)
    state = np.zeros(n + 1, dtype=np.int64)
    mask = 0
    k = 0
    while k >= 0:
        if k == n:
            ok = True
            for r in range(m):
                if rowsum[r] > rhs[r]:
                    ok = False
                    break
            if ok:
                if cnt == cap:
                    bigger = np.empty(cap * 2, dtype=np.int64)
                    bigger[:cap] = out
                    out = bigger
                    cap *= 2
                out[cnt] = mask
                cnt += 1
            k -= 1
            continue
        st = state[k]
        if st == 0:
            prune = False
            for r in range(m):
                if rowsum[r] + negsuf[r, k] > rhs[r]:
                    prune = True
                    break
            if prune:
                k -= 1
                continue
            state[k] = 1
            if forb[k] == 0:
                x[k] = 1
                mask |= np.int64(1) << k
                for r in range(m):
                    rowsum[r] += rows[r, k]
                for p in range(indptr[k], indptr[k + 1]):
                    forb[indices[p]] += 1
            else:
                state[k] = 2
            k += 1
        elif st == 1:
            if x[k] == 1:
                x[k] = 0
                mask ^= np.int64(1) << k
                for r in range(m):
                    rowsum[r] -= rows[r, k]
                for p in range(indptr[k], indptr[k + 1]):
                    forb[indices[p]] -= 1
            state[k] = 2
            k += 1
        else:
            state[k] = 0
            k -= 1
    return np.sort(out[:cnt])


def enumerate_stable_sets_numpy(indptr, indices, n, rows, rhs):
    """Vectorised fallback: sweep every bitmask in blocks of 2**16."""
    edges = []
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if u < v:
                edges.append((u, v))
    shifts = np.arange(n, dtype=np.int64)
    chunks = []
    total = 1 << n
    block = 1 << 16
    for start in range(0, total, block):
        masks = np.arange(start, min(total, start + block), dtype=np.int64)
        ok = np.ones(masks.shape[0], dtype=bool)
        for u, v in edges:
            ok &= ((masks >> u) & (masks >> v) & 1) == 0
        if rows.shape[0]:
            bits = (masks[ok, None] >> shifts) & 1
            lhs = bits @ rows.T
            keep = np.all(lhs <= rhs, axis=1)
            chunks.append(masks[ok][keep])
        else:
            chunks.append(masks[ok])
    if not chunks:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(chunks)


if JIT_ENABLED:
    enumerate_stable_sets = _jit(enumerate_stable_sets_py)
else:
    enumerate_stable_sets = enumerate_stable_sets_numpy


# ---------------------------------------------------------------------------
# total unimodularity: equitable bicolourings of column subsets


def bicolorable_py(M, cols):
    """Can the columns ``cols`` be signed so every row sum lies in {-1,0,1}?"""
    r = M.shape[0]
    k = cols.shape[0]
    partial = np.zeros(r, dtype=np.int64)
    remaining = np.zeros(r, dtype=np.int64)
    for i in range(r):
        for t in range(k):
            if M[i, cols[t]] != 0:
                remaining[i] += 1
    state = np.zeros(k, dtype=np.int64)
    depth = 0
    while depth >= 0:
        if depth == k:
            return True
        j = cols[depth]
        st = state[depth]
        if st != 0:
            s = 1 if st == 1 else -1
            for i in range(r):
                a = M[i, j]
                if a != 0:
                    partial[i] -= s * a
                    remaining[i] += 1
            # the first column keeps sign +1 by symmetry
            if st == 2 or depth == 0:
                state[depth] = 0
                depth -= 1
                continue
        s = 1 if st == 0 else -1
        state[depth] = st + 1
        ok = True
        for i in range(r):
            a = M[i, j]
            if a != 0:
                partial[i] += s * a
                remaining[i] -= 1
                v = partial[i]
                if v < 0:
                    v = -v
                if v - remaining[i] > 1:
                    ok = False
        if ok:
            depth += 1
    return False


bicolorable = _jit(bicolorable_py)


def first_failing_subset_py(M):
    """Smallest column subset (bitmask) with no equitable bicolouring, or -1.

    Subsets are visited by increasing size, in Gosper order within a size.
    Requires at most 62 columns.
    """
    c = M.shape[1]
    cols = np.empty(c, dtype=np.int64)
    limit = np.int64(1) << c
    for s in range(2, c + 1):
        x = (np.int64(1) << s) - 1
        while x < limit:
            k = 0
            for j in range(c):
                if (x >> j) & 1:
                    cols[k] = j
                    k += 1
            if not bicolorable(M, cols[:k]):
                return x
            t = x & -x
            rr = x + t
            x = (((rr ^ x) >> 2) // t) | rr
    return np.int64(-1)


def _first_failing_subset_interp(M):
    # Same walk as the compiled kernel, with Python ints for the masks.
    c = M.shape[1]
    limit = 1 << c
    for s in range(2, c + 1):
        x = (1 << s) - 1
        while x < limit:
            cols = np.array([j for j in range(c) if (x >> j) & 1], dtype=np.int64)
            if not bicolorable(M, cols):
                return x
            t = x & -x
            rr = x + t
            x = (((rr ^ x) >> 2) // t) | rr
    return -1


if JIT_ENABLED:
    first_failing_subset = _jit(first_failing_subset_py)
else:
    first_failing_subset = _first_failing_subset_interp


# ---------------------------------------------------------------------------
# determinants


def bareiss_det_py(A):
    """Fraction-free determinant of a square int64 matrix.

    Exact while every intermediate minor fits in int64, which holds for
    {0,+1,-1} matrices up to order 16.
    """
    k = A.shape[0]
    if k == 0:
        return np.int64(1)
    M = A.copy()
    sign = 1
    prev = np.int64(1)
    for i in range(k - 1):
        if M[i, i] == 0:
            p = -1
            for q in range(i + 1, k):
                if M[q, i] != 0:
                    p = q
                    break
            if p < 0:
                return np.int64(0)
            for c in range(k):
                tmp = M[i, c]
                M[i, c] = M[p, c]
                M[p, c] = tmp
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                M[r, c] = (M[r, c] * M[i, i] - M[r, i] * M[i, c]) // prev
        prev = M[i, i]
    return sign * M[k - 1, k - 1]


bareiss_det = _jit(bareiss_det_py)


def find_bad_minor_py(M, cols, cand_rows):
    """First row choice (lexicographic) making ``M[rows][:, cols]`` have |det| >= 2.

    Returns ``(rows, det)``; ``rows`` is empty when none exists.
    """
    s = cols.shape[0]
    nr = cand_rows.shape[0]
    empty = np.empty(0, dtype=np.int64)
    if s > nr or s == 0:
        return empty, np.int64(0)
    idx = np.arange(s)
    sub = np.empty((s, s), dtype=np.int64)
    while True:
        for a in range(s):
            for b in range(s):
                sub[a, b] = M[cand_rows[idx[a]], cols[b]]
        d = bareiss_det(sub)
        if d >= 2 or d <= -2:
            out = np.empty(s, dtype=np.int64)
            for a in range(s):
                out[a] = cand_rows[idx[a]]
            return out, d
        i = s - 1
        while i >= 0 and idx[i] == nr - s + i:
            i -= 1
        if i < 0:
            return empty, np.int64(0)
        idx[i] += 1
        for j in range(i + 1, s):
            idx[j] = idx[j - 1] + 1


find_bad_minor = _jit(find_bad_minor_py)
