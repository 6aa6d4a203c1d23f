"""Exact rational LP: maximise ``c x`` over an ``IneqSystem``.

The solver runs a revised simplex with Bland's rule on the dual problem,
whose basis has one row per primal variable.  For the systems used here
(few variables, many cut rows) that keeps the explicit basis inverse small.
The primal point is read off the simplex multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .rational import IneqSystem

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


def _to_frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded
    value: Fraction | None = None
    point: list[Fraction] | None = None
    dual: dict = field(default_factory=dict)
    iterations: int = 0


class _Simplex:
    """min cost.lam  s.t.  sum_k col_k lam_k = rhs,  lam >= 0."""

    def __init__(self, nrows: int, cols: list[list[tuple[int, object]]], cost: list, rhs: list,
                 basis: list[int]):
        self.m = nrows
        self.cols = cols
        self.cost = cost
        self.basis = basis
        # initial basis columns are signed unit vectors, so the inverse is diagonal
        zero, one = _Q(0), _Q(1)
        self.binv = [[zero] * nrows for _ in range(nrows)]
        self.xb = [zero] * nrows
        for r, k in enumerate(basis):
            (row, val), = cols[k]
            if row != r:
                raise ValueError("initial basis must be diagonal")
            self.binv[r][r] = one / val
            self.xb[r] = rhs[r] / val
        self.iterations = 0

    def multipliers(self) -> list:
        m = self.m
        cb = [self.cost[k] for k in self.basis]
        pi = [_Q(0)] * m
        for r in range(m):
            c = cb[r]
            if c:
                row = self.binv[r]
                for j in range(m):
                    if row[j]:
                        pi[j] += c * row[j]
        return pi

    def reduced_cost(self, k: int, pi: list):
        d = self.cost[k]
        for j, v in self.cols[k]:
            d -= pi[j] * v
        return d

    def column(self, k: int) -> list:
        out = [_Q(0)] * self.m
        for j, v in self.cols[k]:
            for r in range(self.m):
                b = self.binv[r][j]
                if b:
                    out[r] += b * v
        return out

    def pivot(self, r: int, k: int, dcol: list) -> None:
        m = self.m
        piv = dcol[r]
        rowr = [v / piv for v in self.binv[r]]
        self.binv[r] = rowr
        xr = self.xb[r] / piv
        self.xb[r] = xr
        for i in range(m):
            if i == r:
                continue
            f = dcol[i]
            if f:
                rowi = self.binv[i]
                for j in range(m):
                    if rowr[j]:
                        rowi[j] -= f * rowr[j]
                self.xb[i] -= f * xr
        self.basis[r] = k

    def run(self, allowed: int) -> str:
        """Bland's rule over columns ``0..allowed-1``; returns 'optimal' or 'unbounded'."""
        while True:
            pi = self.multipliers()
            inb = set(self.basis)
            enter = -1
            for k in range(allowed):
                if k not in inb and self.reduced_cost(k, pi) < 0:
                    enter = k
                    break
            if enter < 0:
                return "optimal"
            dcol = self.column(enter)
            leave = -1
            best = None
            for r in range(self.m):
                if dcol[r] > 0:
                    ratio = self.xb[r] / dcol[r]
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leave]):
                        best, leave = ratio, r
            if leave < 0:
                return "unbounded"
            self.pivot(leave, enter, dcol)
            self.iterations += 1


def _solve_dual(sys: IneqSystem, c: list, shift_b: list, upper: list):
    """Build and solve the dual; returns (status, simplex, layout)."""
    n = sys.nvars
    cols: list[list[tuple[int, object]]] = []
    cost: list = []
    layout: list[tuple[str, int]] = []
    for i, (row, s) in enumerate(zip(sys.A.rows, sys.senses)):
        col = [(j, _Q(v.numerator, v.denominator)) for j, v in enumerate(row) if v]
        bi = _Q(shift_b[i].numerator, shift_b[i].denominator)
        cols.append(col)
        cost.append(bi)
        layout.append(("le" if s == "<=" else "eq+", i))
        if s == "==":
            cols.append([(j, -v) for j, v in col])
            cost.append(-bi)
            layout.append(("eq-", i))
    zcol = {}
    for j in range(n):
        if upper[j] is not None:
            zcol[j] = len(cols)
            cols.append([(j, _Q(1))])
            cost.append(_Q(upper[j].numerator, upper[j].denominator))
            layout.append(("up", j))
    wcol = {}
    for j in range(n):
        wcol[j] = len(cols)
        cols.append([(j, _Q(-1))])
        cost.append(_Q(0))
        layout.append(("lo", j))
    real = len(cols)
    basis = []
    art = []
    for j in range(n):
        if c[j] <= 0:
            basis.append(wcol[j])
        elif j in zcol:
            basis.append(zcol[j])
        else:
            art.append(j)
            basis.append(len(cols))
            cols.append([(j, _Q(1))])
            cost.append(_Q(0))
    rhs = list(c)
    if art:
        phase1 = [_Q(0)] * real + [_Q(1)] * len(art)
        sx = _Simplex(n, cols, phase1, rhs, basis)
        sx.run(len(cols))
        if sum(sx.xb[r] for r, k in enumerate(sx.basis) if k >= real) > 0:
            return "infeasible", sx, layout
        for r in range(n):
            if sx.basis[r] >= real:
                for k in range(real):
                    if k in sx.basis:
                        continue
                    dcol = sx.column(k)
                    if dcol[r] != 0:
                        sx.pivot(r, k, dcol)
                        break
        sx.cost = cost
    else:
        sx = _Simplex(n, cols, cost, rhs, basis)
    status = sx.run(real)
    return status, sx, layout


def solve_lp(sys: IneqSystem, objective: Sequence, sense: str = "max") -> LpResult:
    """Exact optimum of ``objective . x`` over ``sys`` (``sense`` 'max' or 'min')."""
    n = sys.nvars
    if len(objective) != n:
        raise ValueError(f"objective has length {len(objective)}, system has {n} variables")
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    obj = [Fraction(v) for v in objective]
    sign = 1 if sense == "max" else -1
    lo = sys.lo
    upper = [None if h is None else h - l for h, l in zip(sys.hi, lo)]
    if any(u is not None and u < 0 for u in upper):
        return LpResult("infeasible")
    shift_b = [bi - sum((a * l for a, l in zip(row, lo) if a), Fraction(0))
               for row, bi in zip(sys.A.rows, sys.b)]
    c = [_Q(sign * v.numerator, v.denominator) for v in obj]
    status, sx, layout = _solve_dual(sys, c, shift_b, upper)
    iters = sx.iterations
    if status == "unbounded":
        return LpResult("infeasible", iterations=iters)
    if status == "infeasible":
        zero = [_Q(0)] * n
        st0, sx0, _ = _solve_dual(sys, zero, shift_b, upper)
        iters += sx0.iterations
        return LpResult("infeasible" if st0 == "unbounded" else "unbounded", iterations=iters)
    pi = sx.multipliers()
    point = [lo[j] + _to_frac(pi[j]) for j in range(n)]
    value = sum((a * x for a, x in zip(obj, point)), Fraction(0))
    lam = [_Q(0)] * len(sx.cols)
    for r, k in enumerate(sx.basis):
        lam[k] = sx.xb[r]
    dual = {"rows": [Fraction(0)] * len(sys.b), "upper": [Fraction(0)] * n, "lower": [Fraction(0)] * n}
    for k, (kind, i) in enumerate(layout):
        v = _to_frac(lam[k]) * sign
        if kind in ("le", "eq+"):
            dual["rows"][i] += v
        elif kind == "eq-":
            dual["rows"][i] -= v
        elif kind == "up":
            dual["upper"][i] = v
        else:
            dual["lower"][i] = v
    return LpResult("optimal", value, point, dual, iters)


def dual_objective(sys: IneqSystem, res: LpResult, objective: Sequence) -> Fraction:
    """Value of the certified dual solution (equals ``res.value`` at optimality).

    For a maximisation the dual bound is ``b.y + hi.z - lo.w + 0`` after the
    lower-bound shift; we evaluate it without the shift.
    """
    total = sum((y * b for y, b in zip(res.dual["rows"], sys.b)), Fraction(0))
    for j in range(sys.nvars):
        if sys.hi[j] is not None:
            total += res.dual["upper"][j] * sys.hi[j]
        total -= res.dual["lower"][j] * sys.lo[j]
    return total


def check_dual_feasible(sys: IneqSystem, res: LpResult, objective: Sequence, sense: str = "max") -> bool:
    """Sign conditions and ``A^T y + z - w == c`` for the reported dual."""
    sign = 1 if sense == "max" else -1
    y, z, w = res.dual["rows"], res.dual["upper"], res.dual["lower"]
    for i, s in enumerate(sys.senses):
        if s == "<=" and y[i] * sign < 0:
            return False
    if any(v * sign < 0 for v in z) or any(v * sign < 0 for v in w):
        return False
    for j in range(sys.nvars):
        col = sum((sys.A.rows[i][j] * y[i] for i in range(len(y))), Fraction(0))
        if col + z[j] - w[j] != Fraction(objective[j]):
            return False
    return True
