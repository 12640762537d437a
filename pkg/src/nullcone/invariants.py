"""Invariant polynomials: Cayley's Omega process, Reynolds operators for
products of SL(m), Schur-Weyl spanning invariants and the algebraic null-cone
test built on them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ResourceError
from .polynomial import (
    ActionFactor,
    ActionSpec,
    Polynomial,
    det_polynomial,
    monomial_count,
    monomials,
    perm_sign,
    tensor_action,
)
from .tensor import Tensor, exact_parts, support

#: cap on monomials enumerated per degree in the exhaustive Reynolds search
MONOMIAL_BUDGET = 20_000


@lru_cache(maxsize=None)
def _signed_perms(m: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    return tuple((s, perm_sign(s)) for s in itertools.permutations(range(m)))


def omega(q: Polynomial, m: int) -> Polynomial:
    """sum over sigma of sgn(sigma) d^m q / dZ_{1,sigma(1)} ... dZ_{m,sigma(m)}."""
    if q.nvars != m * m:
        raise ValueError(f"expected a polynomial in {m * m} variables Z_ij, got {q.nvars}")
    out: dict[tuple[int, ...], object] = {}
    for e, c in q.terms.items():
        for sigma, sgn in _signed_perms(m):
            f = list(e)
            factor = 1
            for i, j in enumerate(sigma):
                k = i * m + j
                if not f[k]:
                    factor = 0
                    break
                factor *= f[k]
                f[k] -= 1
            if factor:
                key = tuple(f)
                out[key] = out.get(key, 0) + sgn * factor * c
    return Polynomial(q.nvars, out)


def omega_power(q: Polynomial, r: int, m: int) -> Polynomial:
    if r < 0:
        raise ValueError("r must be nonnegative")
    for _ in range(r):
        if q.is_zero():
            break
        q = omega(q, m)
    return q


def star(q: Polynomial, A, m: int) -> Polynomial:
    """(A * q)(Z) = q(A^T Z)."""
    A = [[Fraction(x) for x in row] for row in np.asarray(A, dtype=object).tolist()]
    nv = m * m
    images = []
    for i in range(m):
        for j in range(m):
            # (A^T Z)_{ij} = sum_k A_{ki} Z_{kj}
            terms = {}
            for k in range(m):
                if A[k][i]:
                    e = [0] * nv
                    e[k * m + j] = 1
                    terms[tuple(e)] = A[k][i]
            images.append(Polynomial(nv, terms))
    return q.substitute(images)


def _exact_det(A) -> Fraction:
    M = [[Fraction(x) for x in row] for row in np.asarray(A, dtype=object).tolist()]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def equivariance_check(q: Polynomial, A, m: int | None = None) -> bool:
    """Check Omega^r(A * q) == det(A)^r Omega^r(q) exactly, with r = deg(q)/m."""
    A = np.asarray(A, dtype=object)
    m = A.shape[0] if m is None else m
    deg = q.degree()
    if deg < 0:
        return True
    if not q.is_homogeneous() or deg % m:
        raise ValueError("q must be homogeneous of degree divisible by m")
    r = deg // m
    lhs = omega_power(star(q, A, m), r, m)
    rhs = omega_power(q, r, m) * (_exact_det(A) ** r)
    return lhs == rhs


def _lift_z(p: Polynomial, offset: int, nvars: int) -> Polynomial:
    return Polynomial(nvars, {(0,) * offset + e: c for e, c in p.terms.items()})


def substitute_action(p: Polynomial, factor: ActionFactor) -> dict[tuple[int, ...], Polynomial]:
    """Z o p, grouped as {v-exponent: coefficient polynomial in Z}."""
    N, m = factor.dim, factor.m
    if p.nvars != N:
        raise ValueError(f"polynomial has {p.nvars} variables, action space has dimension {N}")
    nv = N + m * m
    images = []
    for a in range(N):
        img = Polynomial.zero(nv)
        for b in range(N):
            rho_ba = factor.rho[b][a]
            if rho_ba:
                img = img + _lift_z(rho_ba, N, nv) * Polynomial.var(nv, b)
        images.append(img)
    full = p.substitute(images)
    grouped: dict[tuple[int, ...], dict] = {}
    for e, c in full.terms.items():
        grouped.setdefault(e[:N], {})[e[N:]] = c
    return {k: Polynomial(m * m, v) for k, v in grouped.items()}


def reynolds_sl(p: Polynomial, factor: ActionFactor) -> Polynomial:
    """Omega^(ell t)(Z o p) for p homogeneous of degree t*m; 0 when m does not divide deg p."""
    N, m = factor.dim, factor.m
    if p.nvars != N:
        raise ValueError(f"polynomial has {p.nvars} variables, action space has dimension {N}")
    if p.is_zero():
        return p
    if not p.is_homogeneous():
        raise ValueError("reynolds_sl expects a homogeneous polynomial")
    deg = p.degree()
    if deg % m:
        return Polynomial.zero(N)
    r = factor.ell * (deg // m)
    out = {}
    for vexp, coeff in substitute_action(p, factor).items():
        val = omega_power(coeff, r, m)
        c = val.constant_value()
        if c:
            out[vexp] = c
    return Polynomial(N, out)


def reynolds_product(p: Polynomial, spec: ActionSpec) -> Polynomial:
    """Apply the per-factor operators in the order d, d-1, ..., 1."""
    for factor in reversed(spec.factors):
        p = reynolds_sl(p, factor)
        if p.is_zero():
            break
    return p


def evaluate_on_tensor(P: Polynomial, X: Tensor):
    """Exact value of a polynomial in the row-major coordinates of X."""
    if X.exact is None:
        raise ValueError("exact evaluation needs a tensor with an exact view")
    return P.evaluate(list(X.exact.reshape(-1)))


# Schur-Weyl spanning invariants

@lru_cache(maxsize=None)
def levi_civita(n: int) -> np.ndarray:
    E = np.zeros((n,) * n, dtype=object)
    E[...] = 0
    for sigma, sgn in _signed_perms(n):
        E[sigma] = sgn
    return E


def _check_sw_args(dims, m, perms, idx):
    d = len(dims) - 1
    if m < 1:
        raise ValueError("degree m must be positive")
    for n in dims[1:]:
        if m % n:
            raise ValueError(f"degree {m} is not divisible by n_i = {n}")
    if len(perms) != d:
        raise ValueError(f"expected {d} permutations, got {len(perms)}")
    perms = [tuple(int(x) for x in p) for p in perms]
    for p in perms:
        if sorted(p) != list(range(m)):
            raise ValueError(f"{p} is not a permutation of range({m})")
    if idx is None:
        idx = [0] * m
    idx = [int(i) for i in idx]
    if len(idx) != m or any(not 0 <= i < dims[0] for i in idx):
        raise ValueError("idx must list m indices into axis 0")
    return perms, idx


def _contract(ops: list[tuple[np.ndarray, list[int]]]):
    """Fully contract a tensor network where every label occurs exactly twice.

    Greedy pairwise order: among pairs sharing a label, the one with the
    smallest intermediate goes first (ties by position).
    """
    ops = {k: (A, list(la)) for k, (A, la) in enumerate(ops)}
    nxt = len(ops)
    while len(ops) > 1:
        owners: dict[int, list[int]] = {}
        for k, (_, la) in ops.items():
            for x in la:
                owners.setdefault(x, []).append(k)
        pairs = {tuple(sorted(v)) for v in owners.values() if len(v) == 2 and v[0] != v[1]}
        if not pairs:  # disconnected pieces: take an outer product
            ks = sorted(ops)
            pairs = {(ks[0], ks[1])}
        best = None
        for a, b in sorted(pairs):
            (A, la), (B, lb) = ops[a], ops[b]
            shared = set(la) & set(lb)
            shape = dict(zip(la, A.shape)) | dict(zip(lb, B.shape))
            out = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
            key = (math.prod(shape[x] for x in out), a, b)
            if best is None or key < best[0]:
                best = (key, a, b, out)
        _, a, b, out = best
        (A, la), (B, lb) = ops.pop(a), ops.pop(b)
        local = {x: i for i, x in enumerate(dict.fromkeys(la + lb))}
        C = np.einsum(A, [local[x] for x in la], B, [local[x] for x in lb],
                      [local[x] for x in out])
        ops[nxt] = (np.asarray(C, dtype=A.dtype), out)
        nxt += 1
    (arr, _), = ops.values()
    return arr[()] if arr.ndim == 0 else arr


def schur_weyl_eval(X: Tensor, m: int, perms: Sequence[Sequence[int]],
                    idx: Sequence[int] | None = None, method: str = "network"):
    """Evaluate the degree-m spanning invariant labelled by (perms, idx) at X.

    Copy alpha of X is sliced at axis-0 index ``idx[alpha]``; for each axis k,
    the copies pi_k(b n_k), ..., pi_k(b n_k + n_k - 1) are antisymmetrized
    together for every block b.  Permutations and indices are 0-based.  The
    result is exact when X is exact.

    ``method="network"`` contracts the Levi-Civita network; ``"enumerate"``
    sums the block-bijective index maps directly (small m only).
    """
    dims = X.dims
    perms, idx = _check_sw_args(dims, m, perms, idx)
    d = X.d
    exact = X.exact is not None
    src = X.exact if exact else X.entries
    if method == "enumerate":
        return _sw_enumerate(src, dims, m, perms, idx, exact)
    if method != "network":
        raise ValueError(f"unknown method {method!r}")
    ops = []
    for a in range(m):
        ops.append((src[idx[a]], [a * d + k for k in range(d)]))
    for k in range(d):
        n = dims[k + 1]
        E = levi_civita(n) if exact else levi_civita(n).astype(np.complex128)
        for b in range(m // n):
            ops.append((E, [perms[k][b * n + c] * d + k for c in range(n)]))
    return _contract(ops)


def _sw_enumerate(src, dims, m, perms, idx, exact):
    d = len(dims) - 1
    per_axis = []
    for k in range(d):
        n = dims[k + 1]
        choices = []
        for taus in itertools.product(_signed_perms(n), repeat=m // n):
            J = [0] * m
            sign = 1
            for b, (tau, sgn) in enumerate(taus):
                sign *= sgn
                for c in range(n):
                    J[perms[k][b * n + c]] = tau[c]
            choices.append((J, sign))
        per_axis.append(choices)
    total = 0 if exact else 0j
    for combo in itertools.product(*per_axis):
        sign = 1
        for _, s in combo:
            sign *= s
        term = sign
        for a in range(m):
            term = term * src[(idx[a],) + tuple(J[a] for J, _ in combo)]
            if not term:
                break
        total = total + term
    return total


def schur_weyl_bound(X: Tensor, m: int) -> float:
    """(n_1 ... n_d)^m ||X||^m, an upper bound on any degree-m spanning invariant."""
    nrm = math.sqrt(float(np.vdot(X.entries, X.entries).real))
    return float(math.prod(X.dims[1:]) ** m) * nrm ** m


def random_sw_params(dims: Sequence[int], m: int, seed: int, sample: int):
    """Seeded (perms, idx) for sample number ``sample`` at degree m.

    Each sample uses its own generator, so results do not depend on how
    samples are scheduled.
    """
    rng = np.random.default_rng([int(seed), int(m), int(sample)])
    d = len(dims) - 1
    perms = [tuple(int(x) for x in rng.permutation(m)) for _ in range(d)]
    idx = [int(x) for x in rng.integers(0, dims[0], size=m)]
    return perms, idx


# Bounds

def derksen_bound(spec: ActionSpec, form: str = "product") -> int:
    """Degree bound for invariants cutting out the null cone.

    ``form="product"``: ell^(sum(m_k^2 - 1)) * max(m_k)^d.
    ``form="exp"``: ceil(exp(2 d ln(ell) max m_k^2)) = ell^(2 d max m_k^2).
    Here ell is the total degree of rho and d the number of factors.
    """
    d = len(spec.factors)
    if d == 0:
        return 1
    ell = spec.ell
    ms = [f.m for f in spec.factors]
    if form == "product":
        return ell ** sum(m * m - 1 for m in ms) * max(ms) ** d
    if form == "exp":
        return ell ** (2 * d * max(m * m for m in ms))
    raise ValueError(f"unknown form {form!r}")


def omega_coefficient_bound(M: int, R: int, n: int, t: int, m: int, ell: int) -> int:
    """M (R n^2)^(t m) (ell t m^4)^(ell t m) for one SL(m) Reynolds step."""
    return M * (R * n * n) ** (t * m) * (ell * t * m ** 4) ** (ell * t * m)


def coefficient_bound(spec: ActionSpec, D: int, M: int = 1) -> int:
    """Bound on the coefficients of reynolds_product applied to a degree-D
    polynomial whose coefficients are at most M in absolute value."""
    bound = M
    for f in reversed(spec.factors):
        if D % f.m:
            return 0
        bound = omega_coefficient_bound(bound, f.R, spec.dim, D // f.m, f.m, f.ell)
    return bound


# Algebraic null-cone test

class AlgebraicVerdict(str, Enum):
    NOT_IN_NULL_CONE = "NotInNullCone"
    NO_WITNESS_FOUND = "NoWitnessFound"
    IN_NULL_CONE = "InNullCone"


@dataclass(frozen=True)
class AlgebraicOutcome:
    verdict: AlgebraicVerdict
    witness: dict | None = None
    certified: bool = False
    evaluations: int = 0
    notes: tuple[str, ...] = field(default=())


def _value_json(v) -> dict:
    re, im = exact_parts(v)
    return {"re": str(re), "im": str(im)}


def invariant_degrees(dims: Sequence[int], degree_cap: int) -> list[int]:
    L = math.lcm(*dims[1:])
    return list(range(L, degree_cap + 1, L))


@lru_cache(maxsize=4096)
def _reynolds_image(dims: tuple[int, ...], exponent: tuple[int, ...]) -> Polynomial:
    return reynolds_product(Polynomial.monomial(exponent), tensor_action(dims))


def nullcone_algebraic(X: Tensor, degree_cap: int, samples: int, rng_seed: int,
                       exhaustive: bool = False,
                       monomial_budget: int = MONOMIAL_BUDGET) -> AlgebraicOutcome:
    """Search for an invariant that does not vanish at X.

    Randomized Schur-Weyl invariants are tried first at each admissible
    degree.  With ``exhaustive=True`` the Reynolds images of all monomials
    up to ``degree_cap`` are evaluated as well.  ``NoWitnessFound`` is
    upgraded to a certified ``InNullCone`` only when the exhaustive search
    covered every degree up to the degree bound.
    """
    from .duality import is_deficient

    if X.exact is None:
        raise ValueError("the algebraic test needs exact (integer or rational) entries")
    if degree_cap < 0 or samples < 0:
        raise ValueError("degree_cap and samples must be nonnegative")
    if X.is_zero():
        return AlgebraicOutcome(AlgebraicVerdict.IN_NULL_CONE, certified=True,
                                notes=("zero tensor",))
    evaluations = 0
    degrees = invariant_degrees(X.dims, degree_cap)
    deficient, _ = is_deficient(support(X))
    if deficient:
        # every invariant is a combination of torus-weight-zero monomials, and
        # none of those is supported on supp(X): all invariants vanish at X
        # (so the exhaustive search below could only come back empty)
        note = "support is deficient: no weight-zero monomial lies on supp(X)"
        bound = derksen_bound(tensor_action(X.dims))
        if exhaustive and degree_cap >= bound:
            return AlgebraicOutcome(AlgebraicVerdict.IN_NULL_CONE, certified=True, notes=(note,))
        notes = (note,) if exhaustive else (note, "randomized search only; not a null-cone certificate")
        if exhaustive:
            notes += (f"degree cap {degree_cap} is below the degree bound {bound}",)
        return AlgebraicOutcome(AlgebraicVerdict.NO_WITNESS_FOUND, notes=notes)
    if exhaustive:
        # fail before doing any work when the whole sweep would not fit
        total = 0
        for D in degrees:
            total += monomial_count(X.size, D)
            if total > monomial_budget:
                raise ResourceError(
                    f"exhaustive search up to degree {D} needs more than {monomial_budget} "
                    f"monomials (C({X.size}+{D}-1, {D}) = {monomial_count(X.size, D)} "
                    f"at degree {D} alone)")
    for m in degrees:
        for s in range(samples):
            perms, idx = random_sw_params(X.dims, m, rng_seed, s)
            val = schur_weyl_eval(X, m, perms, idx)
            evaluations += 1
            if val:
                witness = {"kind": "schur_weyl", "degree": m, "sample": s,
                           "perms": [[p + 1 for p in perm] for perm in perms],
                           "idx": [i + 1 for i in idx], "value": _value_json(val)}
                return AlgebraicOutcome(AlgebraicVerdict.NOT_IN_NULL_CONE, witness,
                                        certified=True, evaluations=evaluations)
    if not exhaustive:
        return AlgebraicOutcome(AlgebraicVerdict.NO_WITNESS_FOUND, evaluations=evaluations,
                                notes=("randomized search only; not a null-cone certificate",))

    spec = tensor_action(X.dims)
    bound = derksen_bound(spec)
    notes = []
    N = X.size
    values = list(X.exact.reshape(-1))
    for D in degrees:
        for e in monomials(N, D):
            P = _reynolds_image(X.dims, e)
            evaluations += 1
            if P:
                val = P.evaluate(values)
                if val:
                    witness = {"kind": "reynolds", "degree": D, "monomial": list(e),
                               "value": _value_json(val)}
                    return AlgebraicOutcome(AlgebraicVerdict.NOT_IN_NULL_CONE, witness,
                                            certified=True, evaluations=evaluations)
    if degree_cap >= bound:
        return AlgebraicOutcome(AlgebraicVerdict.IN_NULL_CONE, certified=True,
                                evaluations=evaluations)
    notes.append(f"degree cap {degree_cap} is below the degree bound {bound}")
    return AlgebraicOutcome(AlgebraicVerdict.NO_WITNESS_FOUND, evaluations=evaluations,
                            notes=tuple(notes))


__all__ = [
    "AlgebraicOutcome",
    "AlgebraicVerdict",
    "coefficient_bound",
    "derksen_bound",
    "det_polynomial",
    "equivariance_check",
    "nullcone_algebraic",
    "omega",
    "omega_coefficient_bound",
    "omega_power",
    "reynolds_product",
    "reynolds_sl",
    "schur_weyl_eval",
    "star",
]
