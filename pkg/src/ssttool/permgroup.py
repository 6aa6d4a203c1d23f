"""Permutation groups: Schreier–Sims chains, orbits, stabilizers, graph automorphisms.

Permutations are tuples of images, ``p[i]`` being the image of ``i``.
Composition follows function notation: ``compose(a, b)[i] == a[b[i]]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(a: Perm, b: Perm) -> Perm:
    """``a`` after ``b``."""
    return tuple(a[i] for i in b)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def is_identity(p: Perm) -> bool:
    return all(i == j for i, j in enumerate(p))


def moved_points(p: Perm) -> list[int]:
    return [i for i, j in enumerate(p) if i != j]


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Non-trivial cycles, each starting at its smallest point."""
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def from_cycles(cycs: Iterable[Sequence[int]], n: int) -> Perm:
    img = list(range(n))
    seen = set()
    for c in cycs:
        for x in c:
            if x in seen:
                raise ValueError(f"point {x} repeated")
            if not 0 <= x < n:
                raise ValueError(f"point {x} out of range for degree {n}")
            seen.add(x)
        if not c:
            continue
        for a, b in zip(c, list(c[1:]) + [c[0]]):
            img[a] = b
    return tuple(img)


def _check_perm(p: Sequence[int], n: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != n:
        raise ValueError(f"permutation of degree {len(p)} where {n} expected")
    if sorted(p) != list(range(n)):
        raise ValueError(f"not a bijection on 0..{n - 1}: {p}")
    return p


# ---------------------------------------------------------------------------
# base and strong generating set


@dataclass(frozen=True)
class Bsgs:
    """Stabilizer chain: ``level_gens[i]`` fix ``base[:i]`` and generate ``G^(i)``.

    ``transversals[i]`` maps each point ``p`` of the basic orbit to a coset
    representative ``u`` with ``u[base[i]] == p``.
    """

    n: int
    base: tuple[int, ...]
    strong_gens: tuple[Perm, ...]
    level_gens: tuple[tuple[Perm, ...], ...]
    transversals: tuple[dict, ...]

    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def is_trivial(self) -> bool:
        return not self.strong_gens

    def strip(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        h = g
        for lvl in range(start, len(self.base)):
            beta = h[self.base[lvl]]
            u = self.transversals[lvl].get(beta)
            if u is None:
                return h, lvl
            h = compose(inverse(u), h)
        return h, len(self.base)

    def contains(self, g: Sequence[int]) -> bool:
        g = tuple(g)
        if len(g) != self.n:
            return False
        h, _ = self.strip(g)
        return is_identity(h)

    def orbit(self, i: int) -> list[int]:
        return orbit(self.strong_gens, i)

    def orbits(self) -> list[list[int]]:
        return orbit_partition(self.strong_gens, self.n)

    def elements(self) -> list[Perm]:
        """All group elements; only sensible for small groups."""
        elems = [identity(self.n)]
        for t in reversed(self.transversals):
            elems = [compose(u, e) for u in t.values() for e in elems]
        return elems


def orbit(gens: Iterable[Perm], i: int) -> list[int]:
    gens = list(gens)
    seen = {i}
    stack = [i]
    while stack:
        p = stack.pop()
        for s in gens:
            q = s[p]
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return sorted(seen)


def orbit_partition(gens: Iterable[Perm], n: int) -> list[list[int]]:
    """Orbits of ``<gens>`` on ``0..n-1``, ordered by smallest element."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in gens:
        for i, j in enumerate(s):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _transversal(gens: Sequence[Perm], point: int, n: int) -> dict:
    trans = {point: identity(n)}
    queue = [point]
    for p in queue:
        for s in gens:
            q = s[p]
            if q not in trans:
                trans[q] = compose(s, trans[p])
                queue.append(q)
    return trans


def schreier_sims(gens: Iterable[Sequence[int]], n: int, base_prefix: Sequence[int] = ()) -> Bsgs:
    """Deterministic Schreier–Sims.

    The base starts with ``base_prefix`` and is extended by the smallest point
    moved by the generators that fix the current base.
    """
    strong: list[Perm] = []
    for g in gens:
        p = _check_perm(g, n)
        if not is_identity(p) and p not in strong:
            strong.append(p)
    base: list[int] = []
    for b in base_prefix:
        if not 0 <= b < n:
            raise ValueError(f"base point {b} out of range")
        if b not in base:
            base.append(b)
    for s in strong:
        if all(s[b] == b for b in base):
            base.append(moved_points(s)[0])

    def fixes_prefix(s: Perm, k: int) -> bool:
        return all(s[base[t]] == base[t] for t in range(k))

    level_gens = [[s for s in strong if fixes_prefix(s, i)] for i in range(len(base))]
    trans = [_transversal(level_gens[i], base[i], n) for i in range(len(base))]

    def strip(g: Perm, start: int) -> tuple[Perm, int]:
        h = g
        for lvl in range(start, len(base)):
            u = trans[lvl].get(h[base[lvl]])
            if u is None:
                return h, lvl
            h = compose(inverse(u), h)
        return h, len(base)

    i = len(base) - 1
    while i >= 0:
        restart = False
        for beta in list(trans[i]):
            u_beta = trans[i][beta]
            for s in list(level_gens[i]):
                h = compose(inverse(trans[i][s[beta]]), compose(s, u_beta))
                y, j = strip(h, i + 1)
                if is_identity(y):
                    continue
                if j == len(base):
                    base.append(moved_points(y)[0])
                    level_gens.append([])
                    trans.append({})
                strong.append(y)
                for lvl in range(i + 1, j + 1):
                    level_gens[lvl].append(y)
                    trans[lvl] = _transversal(level_gens[lvl], base[lvl], n)
                i = j
                restart = True
                break
            if restart:
                break
        if not restart:
            i -= 1

    return Bsgs(n, tuple(base), tuple(strong),
                tuple(tuple(gs) for gs in level_gens), tuple(trans))


def pointwise_stabilizer(group: Bsgs, pts: Sequence[int]) -> Bsgs:
    """Chain for the subgroup fixing every point of ``pts``."""
    pts = list(dict.fromkeys(pts))
    if not pts:
        return group
    if tuple(group.base[:len(pts)]) == tuple(pts):
        full = group
    else:
        full = schreier_sims(group.strong_gens, group.n, base_prefix=pts)
    k = len(pts)
    return Bsgs(group.n, full.base[k:], full.level_gens[k] if k < len(full.base) else (),
                full.level_gens[k:], full.transversals[k:])


# ---------------------------------------------------------------------------
# generator files


def read_generators(text: str, n: int | None = None, base: int = 0) -> list[Perm]:
    """One permutation per line, cycle notation or image list.

    Points are numbered from ``base`` in the text and from 0 in the result.
    """
    raw: list[tuple[str, object]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "(" in line or ")" in line:
            if not re.fullmatch(r"(\(\s*(\d+\s*)*\)\s*)+", line):
                raise ValueError(f"line {lineno}: malformed cycle notation")
            cycs = [tuple(int(x) - base for x in c.split()) for c in re.findall(r"\(([^)]*)\)", line)]
            pts = [x for c in cycs for x in c]
            if len(pts) != len(set(pts)):
                raise ValueError(f"line {lineno}: repeated point")
            raw.append(("cyc", cycs))
        else:
            try:
                imgs = [int(x) - base for x in line.split()]
            except ValueError:
                raise ValueError(f"line {lineno}: malformed image list") from None
            if len(imgs) != len(set(imgs)):
                raise ValueError(f"line {lineno}: repeated point")
            raw.append(("img", imgs))
    if n is None:
        n = 0
        for kind, data in raw:
            if kind == "img":
                n = max(n, len(data))
            else:
                n = max([n] + [x + 1 for c in data for x in c])
    out = []
    for kind, data in raw:
        out.append(from_cycles(data, n) if kind == "cyc" else _check_perm(data, n))
    return out


def write_generators(gens: Iterable[Perm], base: int = 0) -> str:
    lines = []
    for g in gens:
        cs = cycles(g)
        lines.append("".join("(" + " ".join(str(v + base) for v in c) + ")" for c in cs) or "()")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# graph automorphisms by individualisation and refinement


def _refine(adj: Sequence[Iterable[int]], colors: list[int]) -> list[int]:
    """Colour refinement to a stable colouring; colours are canonical ranks."""
    n = len(colors)
    ncol = len(set(colors))
    while True:
        sig = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(n)]
        rank = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [rank[s] for s in sig]
        if len(rank) == ncol:
            return new
        colors, ncol = new, len(rank)


def _individualize(adj, colors: list[int], v: int) -> list[int]:
    sig = [(c, 0 if u == v else 1) for u, c in enumerate(colors)]
    rank = {s: r for r, s in enumerate(sorted(set(sig)))}
    return _refine(adj, [rank[s] for s in sig])


def _target_cell(colors: list[int]) -> list[int] | None:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    best = None
    for c in sorted(cells):
        cell = cells[c]
        if len(cell) > 1 and (best is None or len(cell) < len(best)):
            best = cell
    return best


def _shape(colors: list[int]) -> tuple[int, ...]:
    counts = [0] * (max(colors) + 1 if colors else 0)
    for c in colors:
        counts[c] += 1
    return tuple(counts)


def graph_automorphisms(g) -> list[Perm]:
    """Generators of the weight-preserving automorphism group of ``g``."""
    n = g.n
    if n == 0:
        return []
    adj = g.adj
    wrank = {w: r for r, w in enumerate(sorted(set(g.weights)))}
    root = _refine(adj, [wrank[w] for w in g.weights])

    # leftmost path: individualise the smallest id of the target cell
    path_colors = [root]
    path_pts: list[int] = []
    cells: list[list[int]] = []
    while True:
        cell = _target_cell(path_colors[-1])
        if cell is None:
            break
        cells.append(cell)
        path_pts.append(cell[0])
        path_colors.append(_individualize(adj, path_colors[-1], cell[0]))
    shapes = [_shape(c) for c in path_colors]
    first_leaf = path_colors[-1]

    def leaf_map(leaf: list[int]) -> Perm | None:
        at = [0] * n
        for v, c in enumerate(leaf):
            at[c] = v
        gamma = tuple(at[first_leaf[v]] for v in range(n))
        for v in range(n):
            if g.weights[gamma[v]] != g.weights[v]:
                return None
            if {gamma[u] for u in adj[v]} != set(adj[gamma[v]]):
                return None
        return gamma

    def search(colors: list[int], depth: int) -> Perm | None:
        if _shape(colors) != shapes[depth]:
            return None
        cell = _target_cell(colors)
        if cell is None:
            return leaf_map(colors)
        for u in cell:
            found = search(_individualize(adj, colors, u), depth + 1)
            if found is not None:
                return found
        return None

    gens: list[Perm] = []
    for d in range(len(cells) - 1, -1, -1):
        v = path_pts[d]
        for w in cells[d]:
            if w == v:
                continue
            if w in orbit(gens, v):
                continue
            gamma = search(_individualize(adj, path_colors[d], w), d + 1)
            if gamma is not None and not is_identity(gamma):
                gens.append(gamma)
    return gens
