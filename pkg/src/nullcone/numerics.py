"""Small dense linear algebra: Hermitian eigenproblems, the scaling matrix,
and exact rank over the rationals (or Gaussian rationals)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SingularMarginalError
from .tensor import _as_exact_array, exact_parts

#: relative tolerance below which a floating marginal is treated as singular
SINGULAR_TOL = 1e-12

#: default fractional bits for the optional truncation mode
DEFAULT_TRUNCATION_BITS = 64


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns, unitary

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def check_hermitian(H, tol: float = 1e-12) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H - H.conj().T).max(initial=0.0) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return H


def herm_eig(H, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Pairs (p, q) are visited in row-major order each sweep, so the output is
    deterministic.  Eigenvalues are returned in ascending order.
    """
    A = check_hermitian(H, tol=max(tol, 1e-12)).copy()
    A = (A + A.conj().T) / 2
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    fro = float(np.linalg.norm(A))
    if fro == 0.0:
        return EigenDecomposition(np.zeros(n), V)
    target = 1e-16 * fro
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                # J acts on columns p, q: unitary with J^dagger A J zeroing (p, q)
                J = np.eye(n, dtype=np.complex128)
                J[p, p] = c
                J[q, q] = c
                J[p, q] = s * phase
                J[q, p] = -s * np.conj(phase)
                A = J.conj().T @ A @ J
                A[p, q] = A[q, p] = 0.0
                V = V @ J
    w = np.real(np.diag(A)).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], V[:, order])


def scaling_matrix(rho, n_i: int, tol: float = SINGULAR_TOL) -> np.ndarray:
    """A = det(rho)^(1/(2 n_i)) rho^(-1/2), the determinant-one local step."""
    rho = check_hermitian(rho, tol=1e-10)
    if rho.shape != (n_i, n_i):
        raise ValueError(f"marginal has shape {rho.shape}, expected ({n_i}, {n_i})")
    eig = herm_eig(rho)
    lam = eig.eigenvalues
    tr = float(np.sum(lam))
    if tr <= 0 or lam[0] <= tol * tr:
        raise SingularMarginalError("marginal numerically singular")
    log_det_factor = float(np.sum(np.log(lam))) / (2 * n_i)
    V = eig.eigenvectors
    A = (V * (math.exp(log_det_factor) / np.sqrt(lam))) @ V.conj().T
    return (A + A.conj().T) / 2


def local_step_ratio(rho, n_i: int) -> float:
    """n_i det(rho)^(1/n_i) / tr(rho): factor by which one step rescales the norm."""
    lam = herm_eig(rho).eigenvalues
    tr = float(np.sum(lam))
    if lam[0] <= 0:
        return 0.0
    return n_i * math.exp(float(np.sum(np.log(lam))) / n_i) / tr


def truncate(arr: np.ndarray, bits: int = DEFAULT_TRUNCATION_BITS) -> np.ndarray:
    """Round real and imaginary parts to multiples of 2^-bits."""
    if bits < 1:
        raise ValueError("bits must be positive")
    scale = float(2 ** bits)
    arr = np.asarray(arr, dtype=np.complex128)
    return (np.round(arr.real * scale) + 1j * np.round(arr.imag * scale)) / scale


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """Matrix of exact rational or Gaussian-rational entries (object array)."""

    entries: np.ndarray

    @classmethod
    def from_array(cls, data) -> "RationalMatrix":
        ex = _as_exact_array(data)
        if ex is None or ex.ndim != 2:
            raise ValueError("expected a 2-d array of exact rational entries")
        return cls(ex)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def rank(self) -> int:
        return rational_rank(self)


def rational_rank(M) -> int:
    """Exact rank by fraction-free (Bareiss) elimination.

    Rows are first scaled to integral entries; all later divisions are exact.
    """
    if not isinstance(M, RationalMatrix):
        M = RationalMatrix.from_array(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return 0
    A = []
    for r in range(rows):
        row = list(M.entries[r])
        lcm = 1
        for v in row:
            for part in exact_parts(v):
                lcm = lcm * part.denominator // math.gcd(lcm, part.denominator)
        A.append([v * lcm for v in row])
    rank = 0
    prev = Fraction(1)
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if A[r][c]), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        p = A[rank][c]
        for r in range(rank + 1, rows):
            f = A[r][c]
            A[r] = [(p * A[r][k] - f * A[rank][k]) / prev for k in range(cols)]
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank
