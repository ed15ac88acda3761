"""Exact rank and determinant of integer matrices by fraction-free (Bareiss) elimination."""

from __future__ import annotations

from typing import Sequence


def _as_rows(A) -> list[list[int]]:
    return [[int(x) for x in row] for row in A]


def bareiss_rank(A: Sequence[Sequence[int]]) -> int:
    M = _as_rows(A)
    if not M or not M[0]:
        return 0
    rows, cols = len(M), len(M[0])
    rank, prev = 0, 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for r in range(rank + 1, rows):
            for j in range(c + 1, cols):
                # exact division is guaranteed by Sylvester's identity
                M[r][j] = (p * M[r][j] - M[r][c] * M[rank][j]) // prev
            M[r][c] = 0
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def bareiss_det(A: Sequence[Sequence[int]]) -> int:
    M = _as_rows(A)
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for c in range(n - 1):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        p = M[c][c]
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                M[r][j] = (p * M[r][j] - M[r][c] * M[c][j]) // prev
            M[r][c] = 0
        prev = p
    return sign * M[n - 1][n - 1]
