"""Exact rational matrices and linear inequality systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class RatMatrix:
    """Dense matrix of ``Fraction`` entries with optional row/column labels."""

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None,
                 row_labels: Sequence | None = None, col_labels: Sequence | None = None):
        self.rows: list[list[Fraction]] = [[_frac(v) for v in r] for r in rows]
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        self.ncols = ncols
        self.row_labels = list(row_labels) if row_labels is not None else list(range(len(self.rows)))
        self.col_labels = list(col_labels) if col_labels is not None else list(range(ncols))
        if len(self.row_labels) != len(self.rows) or len(self.col_labels) != ncols:
            raise ValueError("label count mismatch")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self) -> str:
        return f"RatMatrix({self.shape[0]}x{self.shape[1]})"

    def to_int_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for i, r in enumerate(self.rows):
            for j, v in enumerate(r):
                if v.denominator != 1:
                    raise ValueError(f"entry ({i},{j}) = {v} is not integral")
                out[i, j] = int(v)
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix([[self.rows[i][j] for j in cols] for i in rows], len(cols),
                         [self.row_labels[i] for i in rows], [self.col_labels[j] for j in cols])

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self.rows[i][j] for i in range(len(self.rows))] for j in range(self.ncols)],
                         len(self.rows), self.col_labels, self.row_labels)

    def dump(self) -> str:
        """Plain-text grid, one row per line."""
        cells = [[str(v) for v in r] for r in self.rows]
        width = max((len(c) for r in cells for c in r), default=1)
        return "\n".join(" ".join(c.rjust(width) for c in r) for r in cells)


@dataclass(frozen=True)
class Inequality:
    """``sum(coeffs[j] * x_j) <= rhs`` (or ``==`` when ``sense == '=='``)."""

    coeffs: Mapping[int, Fraction]
    rhs: Fraction
    sense: str = "<="
    kind: str = ""

    def lhs(self, x: Sequence) -> Fraction:
        return sum((_frac(c) * x[j] for j, c in self.coeffs.items()), Fraction(0))

    def violation(self, x: Sequence) -> Fraction:
        return self.lhs(x) - _frac(self.rhs)

    def satisfied_by(self, x: Sequence) -> bool:
        v = self.violation(x)
        return v == 0 if self.sense == "==" else v <= 0


@dataclass
class IneqSystem:
    """Rows ``A x (<= | ==) b`` plus per-variable bounds ``lo <= x <= hi``.

    ``hi`` entries may be ``None`` for an unbounded variable.
    """

    A: RatMatrix
    b: list[Fraction]
    senses: list[str] = field(default_factory=list)
    lo: list[Fraction] = field(default_factory=list)
    hi: list = field(default_factory=list)

    def __post_init__(self):
        m, n = self.A.shape
        self.b = [_frac(v) for v in self.b]
        if not self.senses:
            self.senses = ["<="] * m
        if not self.lo:
            self.lo = [Fraction(0)] * n
        if not self.hi:
            self.hi = [Fraction(1)] * n
        self.lo = [_frac(v) for v in self.lo]
        self.hi = [None if v is None else _frac(v) for v in self.hi]
        if len(self.b) != m or len(self.senses) != m or len(self.lo) != n or len(self.hi) != n:
            raise ValueError("dimension mismatch in inequality system")
        if any(s not in ("<=", "==") for s in self.senses):
            raise ValueError("senses must be '<=' or '=='")

    @property
    def nvars(self) -> int:
        return self.A.ncols

    @classmethod
    def from_inequalities(cls, n: int, ineqs: Iterable[Inequality], lo=None, hi=None) -> "IneqSystem":
        rows, b, senses = [], [], []
        for q in ineqs:
            r = [Fraction(0)] * n
            for j, c in q.coeffs.items():
                r[j] += _frac(c)
            rows.append(r)
            b.append(_frac(q.rhs))
            senses.append(q.sense)
        return cls(RatMatrix(rows, n), b, senses, list(lo or []), list(hi or []))

    def inequalities(self) -> list[Inequality]:
        out = []
        for r, rhs, s in zip(self.A.rows, self.b, self.senses):
            out.append(Inequality({j: v for j, v in enumerate(r) if v}, rhs, s))
        return out

    def contains(self, x: Sequence) -> bool:
        for j, v in enumerate(x):
            if v < self.lo[j] or (self.hi[j] is not None and v > self.hi[j]):
                return False
        return all(q.satisfied_by(x) for q in self.inequalities())

    def extended(self, ineqs: Iterable[Inequality]) -> "IneqSystem":
        extra = IneqSystem.from_inequalities(self.nvars, ineqs, self.lo, self.hi)
        return IneqSystem(RatMatrix(self.A.rows + extra.A.rows, self.nvars), self.b + extra.b,
                          self.senses + extra.senses, self.lo, self.hi)

    def dump_lp(self, objective: Sequence | None = None) -> str:
        """Readable LP-style text, for debugging."""
        def term(j, c):
            return f"{'+' if c > 0 else '-'} {abs(c)} x{j}"
        lines = []
        if objective is not None:
            lines.append("maximize " + " ".join(term(j, _frac(c)) for j, c in enumerate(objective) if c))
        lines.append("subject to")
        for r, rhs, s in zip(self.A.rows, self.b, self.senses):
            lines.append("  " + " ".join(term(j, c) for j, c in enumerate(r) if c) + f" {s} {rhs}")
        lines.append("bounds")
        for j in range(self.nvars):
            lines.append(f"  {self.lo[j]} <= x{j} <= {'inf' if self.hi[j] is None else self.hi[j]}")
        return "\n".join(lines)
