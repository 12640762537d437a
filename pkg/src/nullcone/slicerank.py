"""Slice rank: flattening ranks, a greedy upper bound, exact values on tiny
tensors, and consistency checks against the scaling verdict."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from .errors import ResourceError
from .numerics import rational_rank
from .scaling import scale
from .tensor import Tensor, exact_parts, flattening, norm_sq, tensor_power

#: cap on candidate axis patterns examined by the exact search
PATTERN_BUDGET = 10 ** 6


@dataclass(frozen=True)
class SliceRankReport:
    upper: int
    lower: int
    exact: int | None = None
    notes: tuple[str, ...] = field(default=())


def _cubical(X: Tensor) -> int:
    if X.dims[0] != 1:
        raise ValueError("slice rank is defined here for tensors with n0 = 1")
    m = X.dims[1]
    if any(n != m for n in X.dims[1:]):
        raise ValueError(f"expected cubical dims (1, m, ..., m), got {X.dims}")
    return m


def flattening_rank(X: Tensor, axis: int) -> int:
    """Rank of the axis-vs-rest matricization (exact when X is exact)."""
    if not 1 <= axis <= X.d:
        raise ValueError(f"axis must be in 1..{X.d}, got {axis!r}")
    if X.exact is not None:
        return rational_rank(flattening(X, axis, exact=True))
    return int(np.linalg.matrix_rank(flattening(X, axis)))


def slice_rank_upper(X: Tensor, rel_tol: float = 1e-10) -> int:
    """Greedy upper bound on the slice rank.

    Each step projects out, on the axis where it is largest, the leading
    singular direction of the residual; that removes one slice-rank-one layer.
    The count is capped by every flattening rank and by m.
    """
    m = _cubical(X)
    if X.is_zero():
        return 0
    R = X.entries[0].copy()
    d = R.ndim
    stop = rel_tol * math.sqrt(norm_sq(X))
    count = 0
    while np.linalg.norm(R) > stop and count < d * m:
        best = None
        for k in range(d):
            M = np.moveaxis(R, k, 0).reshape(m, -1)
            U, s, _ = np.linalg.svd(M, full_matrices=False)
            if best is None or s[0] > best[0]:
                best = (s[0], k, U[:, 0])
        _, k, u = best
        P = np.eye(m) - np.outer(u, u.conj())
        R = np.moveaxis(np.tensordot(P, R, axes=([1], [k])), 0, k)
        count += 1
    ranks = [flattening_rank(X, k) for k in range(1, X.d + 1)]
    return min([count, m] + ranks)


def _as_sympy(v):
    re, im = exact_parts(v)
    return sympy.Rational(re.numerator, re.denominator) + sympy.I * sympy.Rational(
        im.numerator, im.denominator)


def _quotient_charts(m: int, rank: int, offset: int):
    """RREF charts of rank x m matrices: yields (matrix of sympy exprs, symbols)."""
    for pivots in itertools.combinations(range(m), rank):
        syms = []
        Q = [[sympy.Integer(0)] * m for _ in range(rank)]
        for r, p in enumerate(pivots):
            Q[r][p] = sympy.Integer(1)
            for c in range(p + 1, m):
                if c not in pivots:
                    s = sympy.Symbol(f"q{offset}_{r}_{c}")
                    syms.append(s)
                    Q[r][c] = s
        yield Q, syms


def _pattern_feasible(A: np.ndarray, pattern: tuple[int, ...]) -> bool:
    """Is there a choice of r_k-dimensional U_k with A in sum_k (... U_k ...)?

    Equivalent to (Q_1 x ... x Q_d) A = 0 for quotient maps Q_k of rank
    m - r_k (identity where r_k = 0).  Decided over C with a Groebner basis:
    the system has no solution exactly when the basis is [1].
    """
    m = A.shape[0]
    charts_per_axis = []
    for k, r in enumerate(pattern):
        if r == 0:
            charts_per_axis.append([([[sympy.Integer(int(i == j)) for j in range(m)]
                                      for i in range(m)], [])])
        else:
            charts_per_axis.append(list(_quotient_charts(m, m - r, k)))
    entries = np.vectorize(_as_sympy, otypes=[object])(A)
    domain = "QQ_I" if any(not v.is_real for v in entries.reshape(-1)) else "QQ"
    for combo in itertools.product(*charts_per_axis):
        T = entries
        syms = []
        for k, (Q, s) in enumerate(combo):
            Qa = np.array(Q, dtype=object)
            T = np.moveaxis(np.tensordot(Qa, T, axes=([1], [k])), 0, k)
            syms += s
        eqs = [sympy.expand(e) for e in T.reshape(-1)]
        eqs = [e for e in eqs if e != 0]
        if not eqs:
            return True
        if not syms:
            continue
        G = sympy.groebner(eqs, *syms, order="grevlex", domain=domain)
        if list(G.exprs) != [1]:
            return True
    return False


def slice_rank_exact_small(X: Tensor, use_shortcuts: bool = True,
                           budget: int = PATTERN_BUDGET) -> int:
    """Exact slice rank for m <= 3 and d <= 3.

    Patterns (r_1, ..., r_d) are tried by increasing sum, lexicographically.
    A pattern with some r_k = m is always realizable; one with a single
    nonzero r_k is decided by that flattening rank; the rest go to an exact
    Groebner feasibility test.  With ``use_shortcuts`` a 2-way tensor is
    answered by its matrix rank directly.
    """
    m = _cubical(X)
    d = X.d
    if m > 3 or d > 3:
        raise ResourceError(f"exact slice rank is limited to m <= 3 and d <= 3 (got m={m}, d={d})")
    if X.exact is None:
        raise ValueError("exact slice rank needs exact entries")
    if X.is_zero():
        return 0
    ranks = [flattening_rank(X, k) for k in range(1, d + 1)]
    if use_shortcuts and d == 2:
        return ranks[0]
    A = X.exact[0]
    examined = 0
    for total in range(1, m + 1):
        for pattern in sorted(p for p in itertools.product(range(m + 1), repeat=d) if sum(p) == total):
            examined += 1
            if examined > budget:
                raise ResourceError(f"more than {budget} candidate patterns")
            nonzero = [k for k, r in enumerate(pattern) if r]
            if any(r >= m for r in pattern):
                return total
            if len(nonzero) == 1:
                k = nonzero[0]
                if ranks[k] <= pattern[k]:
                    return total
                continue
            if _pattern_feasible(A, pattern):
                return total
    return m  # pragma: no cover - the pattern (m, 0, ..., 0) always succeeds


def slice_rank_report(X: Tensor, exact: bool = True) -> SliceRankReport:
    m = _cubical(X)
    upper = slice_rank_upper(X)
    notes = ["upper: greedy peeling capped by flattening ranks"]
    ex = None
    if exact and X.exact is not None and m <= 3 and X.d <= 3:
        ex = slice_rank_exact_small(X)
        notes.append("exact: pattern search")
    if ex is not None:
        lower = ex
    elif X.is_zero():
        lower = 0
    elif X.d == 2:
        lower = flattening_rank(X, 1)
    else:
        lower = 1
    return SliceRankReport(upper, lower, ex, tuple(notes))


def instability_from_slice_rank(m: int, d: int) -> float:
    """1/sqrt(d m^3): instability floor for tensors with slice rank below m."""
    if m < 1 or d < 1:
        raise ValueError("m and d must be positive")
    return 1.0 / math.sqrt(d * m ** 3)


@dataclass(frozen=True)
class BridgeReport:
    in_null_cone: bool
    power_in_null_cone: bool
    slice_rank: SliceRankReport
    power_upper: int
    m: int
    consistent: bool
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "in_null_cone": self.in_null_cone,
            "power_in_null_cone": self.power_in_null_cone,
            "slice_rank": {"upper": self.slice_rank.upper, "lower": self.slice_rank.lower,
                           "exact": self.slice_rank.exact},
            "power_slice_rank_upper": self.power_upper,
            "m": self.m,
            "consistent": self.consistent,
            "notes": list(self.notes),
        }


def nullcone_vs_slicerank_check(X: Tensor, eps: float = 1e-3, k: int = 2) -> BridgeReport:
    """Cross-check scaling verdicts on X and X^(x)k against slice-rank bounds."""
    m = _cubical(X)
    rep = slice_rank_report(X)
    v1 = scale(X, eps).in_null_cone
    Xk = tensor_power(X, k)
    v2 = scale(Xk, min(eps, Xk.d / (m ** k) ** 2)).in_null_cone
    up2 = slice_rank_upper(Xk)
    notes = []
    ok = True
    if v1 != v2:
        ok = False
        notes.append(f"verdicts differ between X and its {k}-th tensor power")
    best = rep.exact if rep.exact is not None else rep.upper
    if best < m and not v1:
        ok = False
        notes.append("slice rank below m but scaling found X outside the null cone")
    if up2 < m ** k and not v1:
        ok = False
        notes.append("tensor power has non-full slice rank but X is outside the null cone")
    return BridgeReport(v1, v2, rep, up2, m, ok, tuple(notes))
