"""Alternating tensor scaling and the null-cone verdicts it certifies."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import InconclusiveError, SingularMarginalError, ZeroTensorError
from .numerics import rational_rank, scaling_matrix, truncate
from .tensor import (
    Tensor,
    apply_axis,
    bitsize,
    clear_denominators,
    flattening,
    marginal,
    norm_sq,
    unnormalized_marginal,
)

#: library constant c in the default instability floor n^(-c n)
INSTABILITY_CONSTANT = 4


class Verdict(str, Enum):
    IN_NULL_CONE = "InNullCone"
    SCALED = "Scaled"


class Reason(str, Enum):
    SINGULAR_MARGINAL = "SingularMarginal"
    CAPACITY_BOUND = "CapacityBoundViolated"
    BUDGET_EXHAUSTED = "IterationBudgetExhausted"


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A tuple (A_1, ..., A_d) of determinant-one matrices."""

    factors: tuple[np.ndarray, ...]

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "GroupElement":
        return cls(tuple(np.eye(n, dtype=np.complex128) for n in dims))

    @property
    def d(self) -> int:
        return len(self.factors)

    def times_on_axis(self, A: np.ndarray, axis: int) -> "GroupElement":
        """Left-multiply factor ``axis`` (1-based) by A."""
        fs = list(self.factors)
        fs[axis - 1] = A @ fs[axis - 1]
        return GroupElement(tuple(fs))

    def apply(self, X: Tensor) -> Tensor:
        Y = X
        for i, A in enumerate(self.factors, start=1):
            Y = apply_axis(Y, A, i)
        return Y

    def dets(self) -> list[complex]:
        return [complex(np.linalg.det(A)) for A in self.factors]


@dataclass(frozen=True)
class TraceRow:
    """State of iterate t: its ds and squared norm, and the axis scaled next (0: none)."""

    iter: int
    axis: int
    ds: float
    norm_sq: float


@dataclass(frozen=True, eq=False)
class ScalingOutcome:
    verdict: Verdict
    reason: Reason | None = None
    axis: int | None = None  # singular axis for SingularMarginal
    scaled: Tensor | None = None
    group: GroupElement | None = None
    ds_value: float | None = None
    iterations: int = 0
    bound: int | None = None
    trace: tuple[TraceRow, ...] = field(default=())

    @property
    def in_null_cone(self) -> bool:
        return self.verdict is Verdict.IN_NULL_CONE


def deviations(X: Tensor) -> list[float]:
    """||rho_i - I/n_i||_F^2 for i = 1..d."""
    devs = []
    for i in range(1, X.d + 1):
        rho = marginal(X, i)
        n = X.dims[i]
        devs.append(float(np.sum(np.abs(rho - np.eye(n) / n) ** 2)))
    return devs


def ds(X: Tensor) -> float:
    """Distance to d-stochasticity of the normalized tensor."""
    if norm_sq(X) == 0.0:
        raise ZeroTensorError("ds is undefined for the zero tensor")
    return float(sum(deviations(X)))


def max_admissible_eps(dims: Sequence[int]) -> float:
    d = len(dims) - 1
    return d / max(n * n for n in dims[1:])


def iteration_bound(dims: Sequence[int], b: int, eps: float) -> int:
    """ceil(18 ln2 / (l eps) * d * (b + log2 n)) with l = min n_i, n = prod of dims."""
    dims = tuple(int(n) for n in dims)
    if len(dims) < 2 or any(n < 1 for n in dims):
        raise ValueError(f"invalid dims {dims}")
    if b < 1:
        raise ValueError("bitsize b must be at least 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    limit = max_admissible_eps(dims)
    if eps > limit:
        raise ValueError(f"eps={eps} exceeds the admissible bound d/max(n_i^2) = {limit}")
    d = len(dims) - 1
    ell = min(dims[1:])
    n = math.prod(dims)
    return math.ceil(18 * math.log(2) / (ell * eps) * d * (b + math.log2(n)))


def instability_floor(dims: Sequence[int], c: int = INSTABILITY_CONSTANT) -> Fraction:
    """Conservative default floor n^(-c n) on the instability of null-cone tensors.

    Returned exactly since it underflows double precision for moderate n.
    """
    n = math.prod(int(k) for k in dims)
    return Fraction(1, n ** (c * n))


def capacity_lower_bound(dims: Sequence[int]) -> Fraction:
    """1/(n_1 ... n_d)^2, the capacity floor for integral tensors outside the null cone."""
    return Fraction(1, math.prod(int(k) for k in dims[1:]) ** 2)


def singular_axis(X: Tensor) -> int | None:
    """First axis whose marginal is singular (exact rank test when possible)."""
    for i in range(1, X.d + 1):
        n = X.dims[i]
        if X.exact is not None:
            if rational_rank(flattening(X, i, exact=True)) < n:
                return i
        else:
            if np.linalg.matrix_rank(flattening(X, i)) < n:
                return i
    return None


def scale(
    X: Tensor,
    eps: float,
    max_iters: int | None = None,
    *,
    truncation_bits: int | None = None,
    on_row: Callable[[TraceRow], None] | None = None,
) -> ScalingOutcome:
    """Run the alternating scaling loop on X.

    Returns ``InNullCone`` with a reason, or ``Scaled`` with Y = g X and
    ds(Y) < eps.  Raises InconclusiveError when the budget runs out and the
    verdict cannot be certified (floating input or truncated budget).
    """
    if not isinstance(X, Tensor):
        X = Tensor.from_array(X)
    if not eps > 0:
        raise ValueError("eps must be positive")
    limit = max_admissible_eps(X.dims)
    if eps > limit:
        raise ValueError(f"eps={eps} exceeds the admissible bound d/max(n_i^2) = {limit}")
    if max_iters is not None and max_iters < 0:
        raise ValueError("max_iters must be nonnegative")
    if X.is_zero():
        return ScalingOutcome(Verdict.IN_NULL_CONE, Reason.SINGULAR_MARGINAL, axis=1)

    ax = singular_axis(X)
    if ax is not None:
        return ScalingOutcome(Verdict.IN_NULL_CONE, Reason.SINGULAR_MARGINAL, axis=ax)

    d = X.d
    exact = X.is_exact
    if exact:
        b = bitsize(X)
        _, lcm = clear_denominators(X)
        cap_floor = float(capacity_lower_bound(X.dims)) / float(lcm) ** 2
    else:
        peak = float(np.abs(X.entries).max())
        b = max(1, math.ceil(math.log2(peak)) + 1) if peak > 0 else 1
        cap_floor = None
    bound = iteration_bound(X.dims, b, eps)
    T = bound if max_iters is None else min(bound, max_iters)

    Y = X if truncation_bits is None else Tensor(truncate(X.entries, truncation_bits))
    g = GroupElement.identity(X.dims[1:])
    rows: list[TraceRow] = []

    def emit(row: TraceRow) -> None:
        rows.append(row)
        if on_row is not None:
            on_row(row)

    for t in range(T + 1):
        nrm = norm_sq(Y)
        devs = deviations(Y)
        total = float(sum(devs))
        if cap_floor is not None and nrm < cap_floor * (1 - 1e-9):
            emit(TraceRow(t, 0, total, nrm))
            return ScalingOutcome(Verdict.IN_NULL_CONE, Reason.CAPACITY_BOUND,
                                  iterations=t, bound=bound, ds_value=total, trace=tuple(rows))
        worst = max(devs)
        if worst < eps / d:
            emit(TraceRow(t, 0, total, nrm))
            return ScalingOutcome(Verdict.SCALED, scaled=Y, group=g, ds_value=total,
                                  iterations=t, bound=bound, trace=tuple(rows))
        if t == T:
            emit(TraceRow(t, 0, total, nrm))
            break
        i = devs.index(worst) + 1  # lowest axis wins ties
        emit(TraceRow(t, i, total, nrm))
        rho = unnormalized_marginal(Y, i) / nrm
        try:
            A = scaling_matrix(rho, X.dims[i])
        except SingularMarginalError as exc:
            raise InconclusiveError(
                f"marginal {i} became numerically singular at iteration {t}") from exc
        Y = apply_axis(Y, A, i)
        if truncation_bits is not None:
            Y = Tensor(truncate(Y.entries, truncation_bits))
        g = g.times_on_axis(A, i)

    if exact and T == bound:
        return ScalingOutcome(Verdict.IN_NULL_CONE, Reason.BUDGET_EXHAUSTED,
                              iterations=T, bound=bound, ds_value=rows[-1].ds, trace=tuple(rows))
    raise InconclusiveError(
        f"no scaling with ds < {eps} after {T} iterations "
        f"(full bound {bound}, {'exact' if exact else 'floating'} input)")


def norm_decrease_factor(n_i: int, eps: float, d: int) -> float:
    """Guaranteed per-step shrink factor 2^(-n_i eps / (6 d ln 2))."""
    return 2.0 ** (-n_i * eps / (6 * d * math.log(2)))


def write_trace_csv(rows: Sequence[TraceRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["iter", "axis", "ds", "norm_sq"])
    for r in rows:
        w.writerow([r.iter, r.axis, repr(r.ds), repr(r.norm_sq)])
