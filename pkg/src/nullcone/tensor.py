"""Dense tensors in Ten(n0, n1, ..., nd) and the basic operations on them.

Axis 0 carries no group action; axes 1..d are acted on by SL(n_i).  A tensor
keeps a floating view (``complex128``) and, when it was built from integers or
rationals, an exact view: an object array of :class:`fractions.Fraction`
(real data) or Gaussian rationals (complex data).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

import numpy as np
from sympy.polys.domains import QQ_I

from .errors import ResourceError, ZeroTensorError

#: default cap on the number of entries a derived tensor may have
MAX_ENTRIES = 1 << 22

_GaussianRational = type(QQ_I(0, 1))


def _exact_scalar(value):
    """Convert an exact scalar (int, Fraction, Gaussian rational) or return None."""
    if isinstance(value, (bool, np.bool_)):
        return Fraction(int(value))
    if isinstance(value, (Integral, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, _GaussianRational):
        if not value.y:
            return Fraction(int(value.x.numerator), int(value.x.denominator))
        return value
    return None


def gaussian(re, im=0):
    """Build an exact scalar from rational real and imaginary parts."""
    re, im = Fraction(re), Fraction(im)
    if im == 0:
        return re
    return QQ_I(re, im)


def exact_to_complex(value) -> complex:
    if isinstance(value, _GaussianRational):
        return complex(float(Fraction(int(value.x.numerator), int(value.x.denominator))),
                       float(Fraction(int(value.y.numerator), int(value.y.denominator))))
    return complex(float(value))


def exact_parts(value) -> tuple[Fraction, Fraction]:
    """Real and imaginary parts of an exact scalar as Fractions."""
    if isinstance(value, _GaussianRational):
        return (Fraction(int(value.x.numerator), int(value.x.denominator)),
                Fraction(int(value.y.numerator), int(value.y.denominator)))
    return Fraction(value), Fraction(0)


def exact_conj(value):
    if isinstance(value, _GaussianRational):
        return QQ_I(value.x, -value.y)
    return value


def _as_exact_array(data) -> np.ndarray | None:
    arr = np.asarray(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
    for k, v in enumerate(flat_in):
        e = _exact_scalar(v)
        if e is None:
            return None
        flat_out[k] = e
    return out


def _float_view(exact: np.ndarray) -> np.ndarray:
    flat = [exact_to_complex(v) for v in exact.reshape(-1)]
    return np.array(flat, dtype=np.complex128).reshape(exact.shape)


@dataclass(frozen=True, eq=False)
class Tensor:
    """An order-(d+1) tensor with optional exact view.

    Use :meth:`from_array` rather than the constructor.
    """

    entries: np.ndarray
    exact: np.ndarray | None = None

    def __post_init__(self):
        if self.entries.ndim < 2:
            raise ValueError("a tensor needs at least axes 0 and 1 (d >= 1)")
        if any(n < 1 for n in self.entries.shape):
            raise ValueError(f"all dimensions must be positive, got {self.entries.shape}")
        if self.exact is not None and self.exact.shape != self.entries.shape:
            raise ValueError("exact and floating views disagree in shape")
        self.entries.flags.writeable = False
        if self.exact is not None:
            self.exact.flags.writeable = False

    @classmethod
    def from_array(cls, data, exact: bool | None = None) -> "Tensor":
        """Build a tensor; integer/rational input yields an exact view.

        ``exact=True`` insists on an exact view, ``exact=False`` drops it.
        """
        if isinstance(data, Tensor):
            data = data.exact if data.exact is not None else data.entries
        arr = np.asarray(data)
        ex = None
        if exact is not False and (arr.dtype == object or np.issubdtype(arr.dtype, np.integer)
                                   or arr.dtype == np.bool_):
            ex = _as_exact_array(arr)
        if exact and ex is None:
            raise ValueError("exact view requested but entries are not all rational")
        if ex is not None:
            return cls(_float_view(ex), ex)
        return cls(np.array(arr, dtype=np.complex128), None)

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "Tensor":
        return cls.from_array(np.zeros(tuple(dims), dtype=np.int64))

    @classmethod
    def basis(cls, dims: Sequence[int], index: Sequence[int]) -> "Tensor":
        """Standard basis tensor with a single 1 at ``index`` (0-based)."""
        arr = np.zeros(tuple(dims), dtype=np.int64)
        arr[tuple(index)] = 1
        return cls.from_array(arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.entries.shape)

    @property
    def d(self) -> int:
        return self.entries.ndim - 1

    @property
    def size(self) -> int:
        return int(self.entries.size)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def is_zero(self) -> bool:
        if self.exact is not None:
            return not any(self.exact.reshape(-1))
        return not np.any(self.entries)

    def scaled(self, c) -> "Tensor":
        """Multiply by a scalar; stays exact when both sides are exact."""
        ce = _exact_scalar(c)
        if self.exact is not None and ce is not None:
            return Tensor.from_array(self.exact * ce)
        return Tensor(self.entries * complex(c))

    def __repr__(self) -> str:
        kind = "exact" if self.is_exact else "float"
        return f"Tensor(dims={self.dims}, {kind})"


def _check_axis(X: Tensor, axis: int) -> None:
    if not isinstance(axis, (int, np.integer)) or not 1 <= axis <= X.d:
        raise ValueError(f"axis must be in 1..{X.d}, got {axis!r}")


def flattening(X: Tensor, axis: int, exact: bool = False) -> np.ndarray:
    """Matricization with ``axis`` as rows and all other axes (row-major) as columns."""
    if not 0 <= axis <= X.d:
        raise ValueError(f"axis must be in 0..{X.d}, got {axis!r}")
    if exact:
        if X.exact is None:
            raise ValueError("tensor has no exact view")
        src = X.exact
    else:
        src = X.entries
    return np.moveaxis(src, axis, 0).reshape(X.dims[axis], -1)


def norm_sq(X: Tensor) -> float:
    """Squared Euclidean norm of the entries."""
    return float(np.vdot(X.entries, X.entries).real)


def exact_norm_sq(X: Tensor) -> Fraction:
    if X.exact is None:
        raise ValueError("tensor has no exact view")
    total = Fraction(0)
    for v in X.exact.reshape(-1):
        re, im = exact_parts(v)
        total += re * re + im * im
    return total


def unnormalized_marginal(X: Tensor, axis: int) -> np.ndarray:
    """Marginal of XX^dagger on ``axis``; its trace is ``norm_sq(X)``."""
    _check_axis(X, axis)
    M = flattening(X, axis)
    return M @ M.conj().T


def marginal(X: Tensor, axis: int) -> np.ndarray:
    """Quantum marginal of XX^dagger / X^dagger X on ``axis`` (trace one)."""
    _check_axis(X, axis)
    nrm = norm_sq(X)
    if nrm == 0.0:
        raise ZeroTensorError("zero tensor has no normalized marginal")
    rho = unnormalized_marginal(X, axis) / nrm
    return (rho + rho.conj().T) / 2


def marginals(X: Tensor) -> list[np.ndarray]:
    return [marginal(X, i) for i in range(1, X.d + 1)]


def apply_axis(X: Tensor, A, axis: int) -> Tensor:
    """Act with the square matrix ``A`` on the axis-``axis`` fibers of X.

    The result is exact when X is exact and A has integer or rational entries.
    """
    _check_axis(X, axis)
    A = np.asarray(A)
    n = X.dims[axis]
    if A.shape != (n, n):
        raise ValueError(f"matrix of shape {A.shape} cannot act on axis {axis} of size {n}")
    if X.exact is not None and (A.dtype == object or np.issubdtype(A.dtype, np.integer)):
        Ae = _as_exact_array(A)
        if Ae is not None:
            out = np.tensordot(Ae, X.exact, axes=([1], [axis]))
            return Tensor.from_array(np.moveaxis(out, 0, axis))
    Af = np.array(A, dtype=np.complex128)
    out = np.tensordot(Af, X.entries, axes=([1], [axis]))
    return Tensor(np.ascontiguousarray(np.moveaxis(out, 0, axis)))


def apply_group(X: Tensor, factors: Sequence) -> Tensor:
    """Act with a tuple (A_1, ..., A_d) on axes 1..d."""
    if len(factors) != X.d:
        raise ValueError(f"expected {X.d} factors, got {len(factors)}")
    Y = X
    for i, A in enumerate(factors, start=1):
        Y = apply_axis(Y, A, i)
    return Y


@dataclass(frozen=True)
class Support:
    """A set of index tuples (j_1, ..., j_d), 0-based, inside [n_1] x ... x [n_d]."""

    dims: tuple[int, ...]
    tuples: frozenset

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        tuples = frozenset(tuple(int(j) for j in t) for t in self.tuples)
        for t in tuples:
            if len(t) != len(self.dims) or any(not 0 <= j < n for j, n in zip(t, self.dims)):
                raise ValueError(f"tuple {t} out of bounds for dims {self.dims}")
        object.__setattr__(self, "tuples", tuples)

    @classmethod
    def from_tuples(cls, dims: Sequence[int], tuples: Iterable[Sequence[int]], one_based: bool = False):
        shift = 1 if one_based else 0
        return cls(tuple(dims), frozenset(tuple(j - shift for j in t) for t in tuples))

    @property
    def d(self) -> int:
        return len(self.dims)

    def sorted(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, item) -> bool:
        return tuple(item) in self.tuples


def support(X: Tensor, threshold: float | None = None) -> Support:
    """All (j_1..j_d) where some j_0 slice entry exceeds ``threshold`` in modulus.

    With ``threshold=None`` the exact view is used when present (exact
    nonzero test); otherwise the default is ``1e-12 * max|X|``.
    """
    if threshold is not None and threshold < 0:
        raise ValueError("threshold must be nonnegative")
    if X.exact is not None and not threshold:
        mask = np.zeros(X.dims[1:], dtype=bool)
        for j0 in range(X.dims[0]):
            mask |= np.vectorize(bool, otypes=[bool])(X.exact[j0])
    else:
        mags = np.abs(X.entries).max(axis=0)
        if threshold is None:
            threshold = 1e-12 * float(mags.max()) if mags.size else 0.0
        mask = mags > threshold
    return Support(X.dims[1:], frozenset(map(tuple, np.argwhere(mask).tolist())))


def tensor_power(X: Tensor, k: int, max_entries: int = MAX_ENTRIES) -> Tensor:
    """X^{(x)k} in Ten(n0^k, ..., nd^k), each axis grouping its k copies row-major."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    total = X.size ** k
    if total > max_entries:
        raise ResourceError(f"tensor power would have {total} entries (budget {max_entries})")
    src = X.exact if X.exact is not None else X.entries
    out = src
    for _ in range(k - 1):
        out = np.multiply.outer(out, src)
    order = X.d + 1
    perm = [c * order + i for i in range(order) for c in range(k)]
    out = np.transpose(out, perm).reshape(tuple(n ** k for n in X.dims))
    return Tensor.from_array(out) if X.exact is not None else Tensor(np.ascontiguousarray(out))


def identity_tensor(n: int, n0: int = 1) -> Tensor:
    """The n x n identity matrix viewed in Ten(n0, n, n) (copied along axis 0)."""
    arr = np.zeros((n0, n, n), dtype=np.int64)
    for j0 in range(n0):
        arr[j0] = np.eye(n, dtype=np.int64)
    return Tensor.from_array(arr)


def clear_denominators(X: Tensor) -> tuple[Tensor, int]:
    """Scale an exact tensor to Gaussian-integer entries; returns (X', factor)."""
    if X.exact is None:
        raise ValueError("tensor has no exact view")
    lcm = 1
    for v in X.exact.reshape(-1):
        for part in exact_parts(v):
            lcm = np.lcm(lcm, part.denominator).item()
    return (X if lcm == 1 else X.scaled(lcm)), lcm


def bitsize(X: Tensor) -> int:
    """Largest bit length of the real/imaginary integer parts (at least 1)."""
    Xi, _ = clear_denominators(X)
    b = 1
    for v in Xi.exact.reshape(-1):
        for part in exact_parts(v):
            b = max(b, int(abs(part.numerator)).bit_length())
    return b
