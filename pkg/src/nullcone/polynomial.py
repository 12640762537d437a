"""Sparse multivariate polynomials with exact coefficients, and group actions
described by polynomial matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


def _normalize_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    if isinstance(c, bool):
        return int(c)
    return c


class Polynomial:
    """Polynomial in ``nvars`` variables as a map exponent-tuple -> coefficient.

    Coefficients are ints or Fractions (Gaussian rationals are accepted for
    evaluation points but coefficients stay rational).  Zero coefficients are
    never stored.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = int(nvars)
        clean: dict[Exponent, object] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != nvars or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {nvars} variables")
            if c:
                clean[e] = clean.get(e, 0) + _normalize_coeff(c)
        self.terms = {e: c for e, c in clean.items() if c}

    # construction helpers
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, k: int) -> "Polynomial":
        e = [0] * nvars
        e[k] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exponent: Sequence[int], c=1) -> "Polynomial":
        return cls(len(exponent), {tuple(exponent): c})

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def constant_value(self):
        """The coefficient of the empty monomial."""
        return self.terms.get((0,) * self.nvars, 0)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def max_abs_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(f"x{k}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(e) if p)
            parts.append(f"{self.terms[e]}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # arithmetic
    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise ValueError("polynomials live in different variable sets")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            if not other:
                return Polynomial.zero(self.nvars)
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # calculus and evaluation
    def derivative(self, k: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                f = list(e)
                f[k] -= 1
                out[tuple(f)] = c * e[k]
        return Polynomial(self.nvars, out)

    def evaluate(self, values: Sequence):
        """Exact evaluation when the values are exact (ints, Fractions, Gaussian rationals)."""
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, p in zip(values, e):
                if p:
                    term = term * v ** p
            total = total + term
        return total

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace variable k by ``images[k]`` (all images share one variable set)."""
        if len(images) != self.nvars:
            raise ValueError("one image per variable is required")
        if not images:
            return Polynomial(0, self.terms)
        nv = images[0].nvars
        cache: dict[tuple[int, int], Polynomial] = {}

        def power(k, p):
            if (k, p) not in cache:
                cache[(k, p)] = images[k] ** p
            return cache[(k, p)]

        out = Polynomial.zero(nv)
        for e, c in self.terms.items():
            term = Polynomial.constant(nv, c)
            for k, p in enumerate(e):
                if p:
                    term = term * power(k, p)
            out = out + term
        return out

    # serialization
    def to_json(self) -> dict:
        terms = {",".join(map(str, e)): str(c) for e, c in sorted(self.terms.items())}
        return {"nvars": self.nvars, "terms": terms}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Polynomial":
        nvars = int(obj["nvars"])
        terms = {}
        for key, val in obj["terms"].items():
            e = tuple(int(k) for k in key.split(",")) if key else ()
            terms[e] = Fraction(val)
        return cls(nvars, terms)


def det_polynomial(m: int) -> Polynomial:
    """det Z for the m x m matrix of variables Z_{i,j} (index i*m + j)."""
    terms = {}
    for sigma in itertools.permutations(range(m)):
        e = [0] * (m * m)
        for i, j in enumerate(sigma):
            e[i * m + j] = 1
        terms[tuple(e)] = perm_sign(sigma)
    return Polynomial(m * m, terms)


def perm_sign(sigma: Sequence[int]) -> int:
    sigma = list(sigma)
    sign = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = sigma[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def monomials(nvars: int, degree: int) -> Iterable[Exponent]:
    """All exponent vectors of the given total degree, in lexicographic order (descending)."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            yield (first,) + rest


def monomial_count(nvars: int, degree: int) -> int:
    return math.comb(nvars + degree - 1, degree) if nvars else int(degree == 0)


@dataclass(frozen=True, eq=False)
class ActionFactor:
    """One SL(m) factor acting on V through the polynomial matrix rho(Z).

    ``rho[a][b]`` is a polynomial in the m*m variables Z_{i,j} (index i*m+j),
    homogeneous of degree ``ell``.
    """

    m: int
    rho: tuple[tuple[Polynomial, ...], ...]
    ell: int

    def __post_init__(self):
        N = len(self.rho)
        for row in self.rho:
            if len(row) != N:
                raise ValueError("rho must be square")
            for p in row:
                if p.nvars != self.m * self.m:
                    raise ValueError("rho entries must be polynomials in the m*m variables Z")
                if p and (not p.is_homogeneous() or p.degree() != self.ell):
                    raise ValueError(f"rho entries must be homogeneous of degree {self.ell}")
        ident = [1 if i == j else 0 for i in range(self.m) for j in range(self.m)]
        for a in range(N):
            for b in range(N):
                if self.rho[a][b].evaluate(ident) != (1 if a == b else 0):
                    raise ValueError("rho(I) must be the identity")

    @property
    def dim(self) -> int:
        return len(self.rho)

    @property
    def R(self) -> int:
        """Largest absolute coefficient among the entries of rho."""
        return max((p.max_abs_coeff() for row in self.rho for p in row), default=0)


@dataclass(frozen=True, eq=False)
class ActionSpec:
    """A representation of SL(m_1) x ... x SL(m_k) on V = C^dim."""

    dim: int
    factors: tuple[ActionFactor, ...]

    def __post_init__(self):
        for f in self.factors:
            if f.dim != self.dim:
                raise ValueError("every factor must act on the same space")

    @property
    def ell(self) -> int:
        """Total degree of rho as a polynomial in all group entries."""
        return sum(f.ell for f in self.factors)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "factors": [
                {"m": f.m, "ell": f.ell,
                 "rho": [[p.to_json() for p in row] for row in f.rho]}
                for f in self.factors
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ActionSpec":
        factors = []
        for f in obj["factors"]:
            rho = tuple(tuple(Polynomial.from_json(p) for p in row) for row in f["rho"])
            factors.append(ActionFactor(int(f["m"]), rho, int(f["ell"])))
        return cls(int(obj["dim"]), tuple(factors))


def tensor_action(dims: Sequence[int], axes: Sequence[int] | None = None) -> ActionSpec:
    """SL(n_1) x ... x SL(n_d) acting on Ten(n0, ..., nd), coordinates row-major.

    ``axes`` restricts to a subset of the factors (1-based), e.g. ``(1,)`` for
    left multiplication on matrices viewed in Ten(1, n, n).
    """
    dims = tuple(int(n) for n in dims)
    N = math.prod(dims)
    index = list(itertools.product(*(range(n) for n in dims)))
    axes = tuple(range(1, len(dims))) if axes is None else tuple(axes)
    factors = []
    for k in axes:
        if not 1 <= k < len(dims):
            raise ValueError(f"axis {k} out of range")
        m = dims[k]
        zero = Polynomial.zero(m * m)
        rho = [[zero] * N for _ in range(N)]
        for a, ja in enumerate(index):
            for b, jb in enumerate(index):
                if all(x == y for t, (x, y) in enumerate(zip(ja, jb)) if t != k):
                    rho[a][b] = Polynomial.var(m * m, ja[k] * m + jb[k])
        factors.append(ActionFactor(m, tuple(tuple(r) for r in rho), 1))
    return ActionSpec(N, tuple(factors))
