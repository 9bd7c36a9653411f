"""Exact rational linear algebra: sparse relation solving and dense kernels.

Rationals are gmpy2 ``mpq`` values; every pivot choice is deterministic so
that repeated runs produce identical bases.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import gmpy2

Q = gmpy2.mpq
ZERO = Q(0)
ONE = Q(1)

SparseVec = dict[int, "gmpy2.mpq"]


def _axpy(target: SparseVec, scale, source: Mapping[int, object]) -> None:
    """target += scale * source, dropping zeros."""
    for key, val in source.items():
        new = target.get(key, ZERO) + scale * val
        if new:
            target[key] = new
        else:
            target.pop(key, None)


class RelationSolver:
    """Quotient of the free Q-module on ``nvars`` generators by linear relations.

    Each relation is reduced against the stored pivots and then pivots on
    its largest surviving variable, so a pivot row only involves smaller
    variables.  Back-substitution in increasing order then writes every
    pivot in terms of the free (non-pivot) generators.
    """

    def __init__(self, nvars: int) -> None:
        self.nvars = nvars
        self.rows: dict[int, SparseVec] = {}

    def add(self, relation: Mapping[int, object]) -> bool:
        row: SparseVec = {}
        for key, val in relation.items():
            if val:
                _axpy(row, ONE, {key: Q(val)})
        while row:
            pivots = [v for v in row if v in self.rows]
            if not pivots:
                break
            v = max(pivots)
            _axpy(row, -row[v], self.rows[v])
        if not row:
            return False
        v = max(row)
        inv = ONE / row[v]
        self.rows[v] = {key: val * inv for key, val in row.items()}
        return True

    def solve(self) -> tuple[list[int], list[SparseVec]]:
        """Free generators and, for each generator, its coordinates on them."""
        free = [v for v in range(self.nvars) if v not in self.rows]
        position = {v: i for i, v in enumerate(free)}
        coords: list[SparseVec | None] = [None] * self.nvars
        for v in free:
            coords[v] = {position[v]: ONE}
        for v in sorted(self.rows):
            expr: SparseVec = {}
            for key, val in self.rows[v].items():
                if key == v:
                    continue
                _axpy(expr, -val, coords[key])
            coords[v] = expr
        return free, coords  # type: ignore[return-value]


def rref(matrix: Sequence[Sequence[object]]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q with first-nonzero pivoting."""
    rows = [[Q(x) for x in r] for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = ONE / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        pivot_row = rows[r]
        nz = [j for j in range(c, ncols) if pivot_row[j]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row_i = rows[i]
                for j in nz:
                    row_i[j] -= f * pivot_row[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def kernel(matrix: Sequence[Sequence[object]], ncols: int | None = None) -> list[list]:
    """Basis of {x : M x = 0}, one vector per non-pivot column."""
    if not matrix:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    ncols = len(matrix[0])
    red, pivots = rref(matrix)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        vec = [ZERO] * ncols
        vec[fc] = ONE
        for row, pc in zip(red, pivots):
            vec[pc] = -row[fc]
        basis.append(vec)
    return basis


def mat_vec(matrix: Sequence[Sequence[object]], vec: Sequence[object]) -> list:
    return [sum((a * b for a, b in zip(row, vec) if a), ZERO) for row in matrix]


def lcm_denominator(values: Iterable) -> int:
    out = 1
    for v in values:
        d = int(Q(v).denominator)
        out = out * d // gmpy2.gcd(out, d)
    return int(out)


def rational_gcd(values: Iterable) -> "gmpy2.mpq":
    """Positive generator of the Z-module spanned by the given rationals (0 if all vanish)."""
    vals = [Q(v) for v in values if v]
    if not vals:
        return ZERO
    den = lcm_denominator(vals)
    g = 0
    for v in vals:
        g = gmpy2.gcd(g, int(v * den))
    return Q(int(g), den)
