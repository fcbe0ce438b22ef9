"""Exact Gaussian elimination over Q for the small constant matrices that
certify nondegeneracy and drive the Hamiltonian solver."""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .ring import Rational, rational

Matrix = list[list[Rational]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[rational(x) for x in row] for row in rows]


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = to_matrix(m)
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[list[Rational]]:
    """Basis of ``{x : m x = 0}``, one vector per free column."""
    if not m:
        n = ncols or 0
        return [[mpq(int(i == j)) for i in range(n)] for j in range(n)]
    red, pivots = rref(m)
    n = len(red[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [mpq(0)] * n
        x[f] = mpq(1)
        for row, pc in enumerate(pivots):
            x[pc] = -red[row][f]
        basis.append(x)
    return basis


def independent_rows(m: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset of rows (greedy, in order)."""
    chosen: list[int] = []
    basis: list[list[Rational]] = []
    for i, row in enumerate(m):
        if rank(basis + [list(row)]) > len(basis):
            basis.append(list(row))
            chosen.append(i)
    return chosen


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    aug = [list(row) + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(to_matrix(m))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[sum((x * y for x, y in zip(row, col)), mpq(0)) for col in zip(*b)] for row in a]


def identity(n: int) -> Matrix:
    return [[mpq(int(i == j)) for j in range(n)] for i in range(n)]
