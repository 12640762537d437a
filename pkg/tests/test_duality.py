import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from nullcone import (
    Support,
    Tensor,
    ZeroTensorError,
    capacity_lower_bound,
    identity_tensor,
    scale,
)
from nullcone.duality import (
    InstabilityVerdict,
    capacity_estimate,
    deficiency_value,
    dual_witness,
    eps_instability,
    instability_lower_bound,
    is_deficient,
    local_min_value,
)

from conftest import random_int_tensor, random_sl


def has_perfect_matching(S: Support) -> bool:
    n = S.dims[0]
    G = nx.Graph()
    G.add_nodes_from(("r", i) for i in range(n))
    G.add_nodes_from(("c", j) for j in range(n))
    G.add_edges_from((("r", i), ("c", j)) for i, j in S)
    M = nx.bipartite.hopcroft_karp_matching(G, top_nodes=[("r", i) for i in range(n)])
    return len(M) // 2 == n


def random_support(rng, dims, p=None):
    p = rng.uniform(0.1, 0.9) if p is None else p
    cells = [t for t in itertools.product(*(range(n) for n in dims)) if rng.random() < p]
    return Support(tuple(dims), frozenset(cells))


def qp_oracle(S: Support) -> float:
    """1/||a*|| for the min-norm point of the margin system, by SLSQP."""
    dims = S.dims
    off = np.cumsum((0,) + dims)
    nv = int(off[-1])
    cons = [{"type": "eq", "fun": (lambda a, i=i: np.sum(a[off[i]:off[i + 1]]))}
            for i in range(len(dims))]
    for t in S:
        idx = [int(off[i] + j) for i, j in enumerate(t)]
        cons.append({"type": "ineq", "fun": (lambda a, idx=idx: np.sum(a[idx]) - 1)})
    res = minimize(lambda a: a @ a, np.ones(nv), jac=lambda a: 2 * a, constraints=cons,
                   method="SLSQP", options={"ftol": 1e-14, "maxiter": 1000})
    assert res.success
    return 1 / math.sqrt(res.fun)


# local step and capacity

def test_local_min_examples():
    assert local_min_value(np.eye(2) / 2, 2) == pytest.approx(1.0)
    assert local_min_value(np.diag([0.2, 0.8]), 2) == pytest.approx(0.8)
    assert local_min_value(np.diag([1.0, 0.0]), 2) == 0.0
    with pytest.raises(ValueError):
        local_min_value(np.eye(3), 2)


def test_local_min_at_most_trace(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho = G @ G.conj().T
        assert local_min_value(rho, n) <= np.trace(rho).real * (1 + 1e-12)
    rho = 3 * np.eye(3)
    assert local_min_value(rho, 3) == pytest.approx(9.0)


def test_capacity_identity_constant():
    est = capacity_estimate(identity_tensor(2), 5)
    assert est.value == pytest.approx(2.0)
    assert all(h == pytest.approx(2.0) for h in est.history)


def test_capacity_singular_note():
    est = capacity_estimate(Tensor.basis((1, 2, 2), (0, 0, 0)), 5)
    assert est.value == 0 and "null cone" in est.note
    with pytest.raises(ZeroTensorError):
        capacity_estimate(Tensor.zeros((1, 2, 2)), 1)


def test_capacity_diag_against_search(rng):
    X = Tensor.from_array([[[1, 0], [0, 2]]])
    est = capacity_estimate(X, 30)
    hist = np.array(est.history)
    assert np.all(np.diff(hist) <= 1e-12 * hist[:-1])
    assert est.value == est.history[-1]
    assert est.value == pytest.approx(4.0, rel=1e-6)

    # independent oracle: Nelder-Mead over SL2 x SL2 parametrized by 3 real params each
    def sl2(p):
        a, b, c = p
        M = np.array([[math.exp(a), b], [c, (1 + b * c) * math.exp(-a)]])
        return M

    def f(p):
        A, B = sl2(p[:3]), sl2(p[3:])
        return float(np.sum((A @ np.diag([1.0, 2.0]) @ B.T) ** 2))

    best = min(minimize(f, rng.normal(scale=0.3, size=6), method="Nelder-Mead",
                        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000}).fun
               for _ in range(5))
    assert abs(best - est.value) <= 0.01 * est.value


def test_capacity_lower_bound_examples(rng):
    from fractions import Fraction
    assert capacity_lower_bound((1, 2, 2)) == Fraction(1, 16)
    assert capacity_lower_bound((1, 2, 2, 2)) == Fraction(1, 64)
    checked = 0
    while checked < 50:
        X = random_int_tensor(rng, (1, 2, 2, 2))
        if scale(X, 1e-3).in_null_cone:
            continue
        assert capacity_lower_bound(X.dims) <= capacity_estimate(X, 20).value
        checked += 1


# deficiency

def test_deficiency_examples():
    S = Support.from_tuples((2, 2), [(1, 1), (1, 2)], one_based=True)
    ok, cert = is_deficient(S)
    assert ok and cert.a == ((1, -1), (0, 0)) and cert.verify(S)
    assert deficiency_value(S) == pytest.approx(1 / math.sqrt(2), rel=1e-7)
    S = Support.from_tuples((2, 2), [(1, 1), (2, 2)], one_based=True)
    assert is_deficient(S) == (False, None)
    assert deficiency_value(S) <= 0
    full = Support((3, 3), frozenset(itertools.product(range(3), repeat=2)))
    assert deficiency_value(full) <= 0


def test_dual_witness_when_not_deficient():
    S = Support.from_tuples((2, 2), [(1, 1), (2, 2), (1, 2)], one_based=True)
    T = dual_witness(S)
    assert T is not None and (T >= 0).all()
    for t in itertools.product(range(2), repeat=2):
        if t not in S.tuples:
            assert T[t] == 0
    np.testing.assert_allclose(T.sum(axis=1), [0.5, 0.5])
    np.testing.assert_allclose(T.sum(axis=0), [0.5, 0.5])
    assert dual_witness(Support.from_tuples((2, 2), [(0, 0)])) is None


def test_matching_oracle_random(rng):
    for _ in range(500):
        n = int(rng.integers(2, 6))
        S = random_support(rng, (n, n))
        ok, cert = is_deficient(S)
        assert ok == (not has_perfect_matching(S))
        if ok:
            assert cert.verify(S)
        else:
            assert dual_witness(S) is not None


def test_matching_exhaustive_small():
    for n in (1, 2, 3):
        cells = list(itertools.product(range(n), repeat=2))
        for mask in range(1 << len(cells)):
            S = Support((n, n), frozenset(c for k, c in enumerate(cells) if mask >> k & 1))
            ok, cert = is_deficient(S)
            assert ok == (not has_perfect_matching(S))
            if ok:
                assert cert.verify(S)


def test_certificate_soundness_d3(rng):
    for _ in range(100):
        S = random_support(rng, (2, 3, 2))
        ok, cert = is_deficient(S)
        if ok:
            assert all(sum(r) == 0 for r in cert.a)
            assert all(v >= 1 for v in cert.margins(S))
            assert all(isinstance(v, int) for r in cert.a for v in r)


def test_deficiency_value_vs_qp_oracle(rng):
    compared = 0
    for _ in range(40):
        dims = tuple(int(n) for n in rng.integers(2, 4, size=int(rng.integers(2, 4))))
        S = random_support(rng, dims, p=0.25)
        if not S.tuples or not is_deficient(S)[0]:
            continue
        assert deficiency_value(S) == pytest.approx(qp_oracle(S), rel=1e-6)
        compared += 1
    assert compared >= 20


def test_positivity_iff_deficient(rng):
    for _ in range(200):
        dims = tuple(int(n) for n in rng.integers(2, 4, size=int(rng.integers(2, 4))))
        S = random_support(rng, dims)
        if not S.tuples:
            continue
        assert (deficiency_value(S) > 0) == is_deficient(S)[0]


# instability

def test_instability_examples(rng):
    X = Tensor.basis((1, 2, 2), (0, 0, 0))
    assert instability_lower_bound(X) >= 1 / math.sqrt(2)
    Y = identity_tensor(3)
    bases = [[random_sl(rng, 3), random_sl(rng, 3)] for _ in range(5)]
    assert instability_lower_bound(Y, bases) <= 0
    N = Tensor.from_array([[[0, 1], [0, 0]]])
    vals = [instability_lower_bound(N, bases[:0])]
    Bs = [[random_sl(rng, 2), random_sl(rng, 2)] for _ in range(4)]
    for k in range(1, 5):
        vals.append(instability_lower_bound(N, Bs[:k]))
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ZeroTensorError):
        instability_lower_bound(Tensor.zeros((1, 2, 2)))


def test_eps_instability_examples():
    assert eps_instability(identity_tensor(2), 0.1) is InstabilityVerdict.NOT_IN_NULL_CONE
    e11 = Tensor.basis((1, 2, 2), (0, 0, 0))
    assert eps_instability(e11, 0.5) is InstabilityVerdict.INSTABILITY_AT_LEAST_EPS
    N = Tensor.from_array([[[0, 1], [0, 0]]])
    assert instability_lower_bound(N) > 0.3
    assert eps_instability(N, 0.3) is InstabilityVerdict.INSTABILITY_AT_LEAST_EPS
    with pytest.raises(ValueError):
        eps_instability(N, 0.0)


def test_ins_below_sqrt_ds_along_iterates(rng):
    for _ in range(15):
        arr = rng.integers(-2, 3, size=(1, 2, 3, 2)) * (rng.random((1, 2, 3, 2)) < 0.4)
        X = Tensor.from_array(arr)
        if X.is_zero():
            continue
        out = scale(X, 1e-3)
        bases = []
        for _ in range(4):
            perms = [np.eye(n)[rng.permutation(n)] * rng.uniform(0.5, 2, size=n) for n in X.dims[1:]]
            bases.append(perms)
        lb = instability_lower_bound(X, bases)
        for row in out.trace:
            assert lb <= math.sqrt(row.ds) + 1e-6


def test_duality_dichotomy(rng):
    for _ in range(30):
        arr = rng.integers(0, 2, size=(1, 2, 2, 2))
        X = Tensor.from_array(arr)
        if X.is_zero():
            continue
        out = scale(X, 1e-3)
        cap = capacity_estimate(X, 200)
        small_cap = cap.value < float(capacity_lower_bound(X.dims))
        found_scaling = not out.in_null_cone
        assert not (small_cap and found_scaling)
        assert small_cap or found_scaling


@given(st.integers(2, 4), st.data())
def test_certificate_integrality_property(n, data):
    cells = data.draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1))
    S = Support((n, n), frozenset(cells))
    ok, cert = is_deficient(S)
    if ok:
        assert cert.verify(S)
