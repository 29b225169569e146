"""Exact linear algebra over the rationals via fraction-free (Bareiss) elimination."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators so it becomes integral."""
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        d = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * d) for x in row])
    return out


def bareiss_solve(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve ``A x = b`` for square, nonsingular integer ``A``.

    Forward elimination is fraction-free (every intermediate entry is an
    integer minor); only the final back substitution divides.
    """
    n = len(A)
    M = [list(map(int, A[i])) + [int(b[i])] for i in range(n)]
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n + 1):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(M[i][n])
        for j in range(i + 1, n):
            if M[i][j]:
                s -= M[i][j] * x[j]
        x[i] = s / M[i][i]
    return x


def rank(A: Sequence[Sequence[Fraction]]) -> int:
    """Rank via fraction-free elimination."""
    M = integer_rows(A)
    rows, cols = len(M), len(M[0]) if M else 0
    r = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pk = M[r][c]
        for i in range(r + 1, rows):
            mic = M[i][c]
            for j in range(c + 1, cols):
                M[i][j] = (M[i][j] * pk - mic * M[r][j]) // prev
            M[i][c] = 0
        prev = pk
        r += 1
        if r == rows:
            break
    return r
