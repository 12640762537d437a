"""Exact two-phase simplex over the rationals with Bland's rule.

Solves  minimize c.x  subject to  A x = b, x >= 0  with Fraction arithmetic.
Instances here are tiny (tens of variables), so a dense tableau is fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    piv = T[r][c]
    row = [v / piv for v in T[r]]
    T[r] = row
    for k in range(len(T)):
        if k != r and T[k][c]:
            f = T[k][c]
            T[k] = [a - f * b for a, b in zip(T[k], row)]
    basis[r] = c


def _run(T: list[list[Fraction]], basis: list[int], ncols: int, allowed: Sequence[bool]) -> bool:
    """Minimize the objective stored in the last row; False if unbounded.

    The objective row holds reduced costs; the RHS sits in column ``ncols``.
    """
    while True:
        # Bland: smallest index with negative reduced cost enters
        enter = next((j for j in range(ncols) if allowed[j] and T[-1][j] < 0), None)
        if enter is None:
            return True
        best, leave = None, None
        for r in range(len(T) - 1):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            return False
        _pivot(T, basis, leave, enter)


def solve(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimize c.x subject to A x = b and x >= 0, exactly."""
    m = len(A)
    n = len(c)
    c = [Fraction(v) for v in c]
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        if len(row) != n:
            raise ValueError("constraint row length does not match objective")
        rhs = Fraction(b[i])
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append((row, rhs))

    # phase 1: artificial variables n..n+m-1
    ncols = n + m
    T = []
    for i, (row, rhs) in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(row + art + [rhs])
    basis = list(range(n, n + m))
    obj = [Fraction(0)] * (ncols + 1)
    for i in range(m):
        obj = [o - t for o, t in zip(obj, T[i])]
    for j in range(n, n + m):
        obj[j] = Fraction(0)
    T.append(obj)
    _run(T, basis, ncols, [True] * ncols)
    if T[-1][ncols] != 0:
        return LPResult("infeasible")

    # drive artificial variables out of the basis; drop redundant rows
    r = 0
    while r < len(T) - 1:
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                del T[r]
                del basis[r]
                continue
            _pivot(T, basis, r, col)
        r += 1

    # phase 2 on the original columns
    T = [row[:n] + [row[ncols]] for row in T[:-1]]
    obj = c + [Fraction(0)]
    for i, bj in enumerate(basis):
        if obj[bj]:
            f = obj[bj]
            obj = [o - f * t for o, t in zip(obj, T[i])]
    T.append(obj)
    if not _run(T, basis, n, [True] * n):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, bj in enumerate(basis):
        x[bj] = T[i][n]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", tuple(x), value)
