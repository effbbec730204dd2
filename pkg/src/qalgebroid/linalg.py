"""Exact linear algebra over Q.

Ranks use fraction-free (Bareiss) elimination on integer rows obtained by
clearing denominators row by row.  Kernels and solves use exact RREF over
:class:`fractions.Fraction`.  Matrices are lists of rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence

Matrix = List[List[Fraction]]
Vector = List[Fraction]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def transpose(A: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> Matrix:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]], inner: Optional[int] = None) -> Matrix:
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = zeros(len(A), n)
    for i, row in enumerate(A):
        acc = out[i]
        for k, a in enumerate(row):
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        acc[j] += a * b
    return out


def is_zero(A: Sequence[Sequence[Fraction]]) -> bool:
    return all(not x for row in A for x in row)


def _integer_rows(A: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    rows = []
    for row in A:
        den = 1
        for x in row:
            if x:
                den = lcm(den, Fraction(x).denominator)
        ints = [int(Fraction(x) * den) for x in row]
        if any(ints):
            rows.append(ints)
    return rows


def rank(A: Sequence[Sequence[Fraction]]) -> int:
    """Rank by fraction-free Gaussian elimination."""
    M = _integer_rows(A)
    if not M:
        return 0
    m, n = len(M), len(M[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        for i in range(r + 1, m):
            a = M[i][c]
            row_i, row_r = M[i], M[r]
            for j in range(c + 1, n):
                row_i[j] = (p * row_i[j] - a * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
        if r == m:
            break
    return r


def rref(A: Sequence[Sequence[Fraction]], ncols: Optional[int] = None):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace(A: Sequence[Sequence[Fraction]], ncols: int) -> List[Vector]:
    """Basis of {v : A v = 0}; one vector per free column, in column order."""
    R, pivots = rref(A, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], ncols: int) -> Optional[Vector]:
    """One solution of A x = b, or None when inconsistent."""
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(A, b)]
    R, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(R, pivots):
        x[p] = row[ncols]
    return x


def inverse(A: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in R[:n]]
