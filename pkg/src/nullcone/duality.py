"""Capacity (the primal side) and supports, deficiency and instability
(the Hilbert-Mumford side)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InconclusiveError, SingularMarginalError, ZeroTensorError
from .lp import solve
from .numerics import herm_eig, scaling_matrix
from .scaling import (
    Verdict,
    capacity_lower_bound,
    scale,
    singular_axis,
)
from .tensor import Support, Tensor, apply_axis, apply_group, norm_sq, support, unnormalized_marginal

__all__ = [
    "CapacityEstimate",
    "DeficiencyCertificate",
    "InstabilityVerdict",
    "capacity_estimate",
    "capacity_lower_bound",
    "deficiency_value",
    "dual_witness",
    "eps_instability",
    "instability_lower_bound",
    "is_deficient",
    "local_min_value",
]


def local_min_value(rho, n_i: int) -> float:
    """n_i det(rho)^(1/n_i), the optimum of the one-axis problem; 0 if singular."""
    lam = herm_eig(rho).eigenvalues
    if lam.shape != (n_i,):
        raise ValueError(f"marginal has dimension {lam.shape[0]}, expected {n_i}")
    tr = float(np.sum(lam))
    if tr <= 0 or lam[0] <= 1e-14 * tr:
        return 0.0
    return n_i * math.exp(float(np.sum(np.log(lam))) / n_i)


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    iterations: int
    history: tuple[float, ...]
    note: str = ""


def capacity_estimate(X: Tensor, sweeps: int) -> CapacityEstimate:
    """Cyclic sweeps of the closed-form local step; an upper estimate of cap(X).

    ``history`` holds the squared norm before the first step and after each step.
    """
    if sweeps < 0:
        raise ValueError("sweeps must be nonnegative")
    if X.is_zero():
        raise ZeroTensorError("capacity estimate needs a nonzero tensor")
    ax = singular_axis(X)
    if ax is not None:
        return CapacityEstimate(0.0, 0, (norm_sq(X),),
                                note=f"singular marginal on axis {ax}: tensor is in the null cone")
    Y = X
    hist = [norm_sq(Y)]
    steps = 0
    for _ in range(sweeps):
        for i in range(1, X.d + 1):
            rho = unnormalized_marginal(Y, i)
            try:
                A = scaling_matrix(rho / np.trace(rho).real, X.dims[i])
            except SingularMarginalError:
                return CapacityEstimate(0.0, steps, tuple(hist),
                                        note=f"marginal {i} numerically singular: capacity tends to 0")
            Y = apply_axis(Y, A, i)
            steps += 1
            hist.append(norm_sq(Y))
    return CapacityEstimate(hist[-1], steps, tuple(hist))


@dataclass(frozen=True)
class DeficiencyCertificate:
    """Integer exponents a[i][j] with zero row sums and sum_i a[i][j_i] >= 1 on the support."""

    a: tuple[tuple[int, ...], ...]

    def margins(self, S: Support) -> list[int]:
        return [sum(self.a[i][j] for i, j in enumerate(t)) for t in S.sorted()]

    def verify(self, S: Support) -> bool:
        if len(self.a) != S.d or any(len(row) != n for row, n in zip(self.a, S.dims)):
            return False
        if any(sum(row) != 0 for row in self.a):
            return False
        return all(v >= 1 for v in self.margins(S))

    def to_json(self) -> dict:
        return {"a": [list(row) for row in self.a]}


def _var_index(dims: Sequence[int]) -> list[list[int]]:
    idx, k = [], 0
    for n in dims:
        idx.append(list(range(k, k + n)))
        k += n
    return idx


def _deficiency_lp(S: Support):
    """Feasibility LP for a in Gamma with margin >= 1 on S, a split as p - q."""
    idx = _var_index(S.dims)
    nv = sum(S.dims)
    tuples = S.sorted()
    ns = len(tuples)
    ncols = 2 * nv + ns
    A, b = [], []
    for i, n in enumerate(S.dims):
        row = [0] * ncols
        for j in range(n):
            row[idx[i][j]] = 1
            row[nv + idx[i][j]] = -1
        A.append(row)
        b.append(0)
    for s, t in enumerate(tuples):
        row = [0] * ncols
        for i, j in enumerate(t):
            row[idx[i][j]] += 1
            row[nv + idx[i][j]] -= 1
        row[2 * nv + s] = -1
        A.append(row)
        b.append(1)
    return solve([0] * ncols, A, b), idx, nv


def is_deficient(S: Support) -> tuple[bool, DeficiencyCertificate | None]:
    """Exact decision; returns an integer certificate when the support is deficient."""
    if len(S) == 0:
        return True, DeficiencyCertificate(tuple(tuple(0 for _ in range(n)) for n in S.dims))
    res, idx, nv = _deficiency_lp(S)
    if res.status != "optimal":
        return False, None
    x = res.x
    a = [[x[idx[i][j]] - x[nv + idx[i][j]] for j in range(n)] for i, n in enumerate(S.dims)]
    lcm = 1
    for row in a:
        for v in row:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    cert = DeficiencyCertificate(tuple(tuple(int(v * lcm) for v in row) for row in a))
    if not cert.verify(S):  # pragma: no cover - the LP solution is exact
        raise AssertionError("deficiency certificate failed exact verification")
    return True, cert


def dual_witness(S: Support) -> np.ndarray | None:
    """Nonnegative tensor on S with every axis marginal uniform, or None if none exists.

    Such a tensor exists exactly when S is not deficient.
    """
    tuples = S.sorted()
    if not tuples:
        return None
    A, b = [], []
    for i, n in enumerate(S.dims):
        for j in range(n):
            A.append([1 if t[i] == j else 0 for t in tuples])
            b.append(Fraction(1, n))
    res = solve([0] * len(tuples), A, b)
    if res.status != "optimal":
        return None
    T = np.zeros(S.dims)
    for t, v in zip(tuples, res.x):
        T[t] = float(v)
    return T


def _gamma_basis(dims: Sequence[int]) -> np.ndarray:
    """Orthonormal basis (columns) of the zero-row-sum subspace, block diagonal."""
    total = sum(dims)
    cols = []
    off = 0
    for n in dims:
        if n > 1:
            # orthonormal basis of the complement of the all-ones vector
            Q, _ = np.linalg.qr(np.hstack([np.ones((n, 1)), np.eye(n)[:, : n - 1]]))
            block = np.zeros((total, n - 1))
            block[off:off + n] = Q[:, 1:n]
            cols.append(block)
        off += n
    if not cols:
        return np.zeros((total, 0))
    return np.hstack(cols)


def _margin_matrix(S: Support) -> np.ndarray:
    idx = _var_index(S.dims)
    M = np.zeros((len(S), sum(S.dims)))
    for s, t in enumerate(S.sorted()):
        for i, j in enumerate(t):
            M[s, idx[i][j]] += 1.0
    return M


def _min_norm_point(K: np.ndarray, tol: float, max_iter: int) -> float:
    """min ||z||^2 subject to K z >= 1, via FISTA on the dual with active-set polishing.

    Dual: max_{lam >= 0} 1.lam - ||K^T lam||^2 / 4, with z = K^T lam / 2.
    Returns the optimum once the relative duality gap is below ``tol``.
    """
    m = K.shape[0]
    ones = np.ones(m)
    L = 0.5 * float(np.linalg.norm(K, 2)) ** 2
    if L == 0.0:
        raise ValueError("empty constraint matrix")

    def dual(lam):
        z = K.T @ lam
        return float(ones @ lam - 0.25 * (z @ z))

    def primal_from(lam):
        z = K.T @ lam / 2
        marg = K @ z
        lo = float(marg.min())
        if lo <= 0:
            return math.inf
        z = z / lo
        return float(z @ z)

    def polish(lam):
        act = lam > 1e-10 * max(1.0, float(lam.max()))
        if not act.any():
            return None
        KA = K[act]
        lamA, *_ = np.linalg.lstsq(KA @ KA.T, 2 * ones[act], rcond=None)
        if lamA.min() < -1e-12:
            return None
        full = np.zeros(m)
        full[act] = np.maximum(lamA, 0.0)
        return full

    lam = np.zeros(m)
    y = lam.copy()
    tk = 1.0
    best_p, best_g = math.inf, -math.inf
    for it in range(max_iter):
        grad = ones - 0.5 * (K @ (K.T @ y))
        new = np.maximum(y + grad / L, 0.0)
        tn = (1 + math.sqrt(1 + 4 * tk * tk)) / 2
        if dual(new) < dual(lam):  # adaptive restart
            y, tk = lam.copy(), 1.0
            continue
        y = new + (tk - 1) / tn * (new - lam)
        lam, tk = new, tn
        if it % 25 == 0:
            for cand in (lam, polish(lam)):
                if cand is None:
                    continue
                best_g = max(best_g, dual(cand))
                best_p = min(best_p, primal_from(cand))
            if best_p < math.inf and best_p - best_g <= tol * best_p:
                return best_p
    raise InconclusiveError(
        f"min-norm iteration did not certify a duality gap below {tol} "
        f"(primal {best_p}, dual {best_g})")


def deficiency_value(S: Support, tol: float = 1e-8, max_iter: int = 200_000) -> float:
    """Optimal normalized margin over Gamma; 0.0 when S is not deficient.

    For deficient S this is 1/||a*|| with a* the minimum-norm point of
    {a in Gamma : sum_i a[i][j_i] >= 1 on S}.
    """
    deficient, _ = is_deficient(S)
    if not deficient:
        return 0.0
    if len(S) == 0:
        return math.inf
    K = _margin_matrix(S) @ _gamma_basis(S.dims)
    return 1.0 / math.sqrt(_min_norm_point(K, tol, max_iter))


def instability_lower_bound(X: Tensor, bases: Sequence[Sequence] = ()) -> float:
    """max of deficiency_value(supp(B X)) over the identity and the supplied bases."""
    if X.is_zero():
        raise ZeroTensorError("instability is undefined for the zero tensor")
    best = deficiency_value(support(X))
    for B in bases:
        best = max(best, deficiency_value(support(apply_group(X, B))))
    return best


class InstabilityVerdict(str, Enum):
    NOT_IN_NULL_CONE = "NotInNullCone"
    INSTABILITY_AT_LEAST_EPS = "InstabilityAtLeastEps"


def eps_instability(X: Tensor, eps: float, max_iters: int | None = None) -> InstabilityVerdict:
    """Promise problem: not in the null cone, or instability at least eps.

    Runs the scaling loop with target eps^2.  On promise-violating inputs the
    verdict is whatever the scaling loop yields; it is deterministic.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    out = scale(X, eps * eps, max_iters)
    if out.verdict is Verdict.SCALED:
        return InstabilityVerdict.NOT_IN_NULL_CONE
    return InstabilityVerdict.INSTABILITY_AT_LEAST_EPS
