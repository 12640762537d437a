import itertools

import numpy as np
import pytest
import sympy

from nullcone import ResourceError, Tensor, identity_tensor, scale
from nullcone.duality import InstabilityVerdict, eps_instability
from nullcone.slicerank import (
    flattening_rank,
    instability_from_slice_rank,
    nullcone_vs_slicerank_check,
    slice_rank_exact_small,
    slice_rank_report,
    slice_rank_upper,
)


def cube(entries, m=2, d=3):
    arr = np.zeros((1,) + (m,) * d, dtype=int)
    for idx, v in entries.items():
        arr[(0,) + idx] = v
    return Tensor.from_array(arr)


def diagonal(k, m=3, d=3):
    return cube({(j,) * d: 1 for j in range(k)}, m, d)


W = cube({(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1})
E111 = cube({(0, 0, 0): 1})


def test_flattening_rank_examples(rng):
    assert all(flattening_rank(diagonal(2, 2), k) == 2 for k in (1, 2, 3))
    assert flattening_rank(E111, 2) == 1
    for _ in range(20):
        X = Tensor.from_array(rng.integers(-2, 3, size=(1, 2, 2, 2)))
        for k in (1, 2, 3):
            M = sympy.Matrix(np.moveaxis(X.exact[0], k - 1, 0).reshape(2, -1).tolist())
            assert flattening_rank(X, k) == M.rank()
    with pytest.raises(ValueError):
        flattening_rank(E111, 4)


def test_upper_examples():
    assert slice_rank_upper(cube({})) == 0
    assert slice_rank_upper(E111) == 1
    for k in range(4):
        assert slice_rank_upper(diagonal(k)) == k
        assert slice_rank_exact_small(diagonal(k)) == k
    with pytest.raises(ValueError):
        slice_rank_upper(Tensor.zeros((1, 2, 3)))
    with pytest.raises(ValueError):
        slice_rank_upper(Tensor.zeros((2, 2, 2)))


def test_exact_examples():
    assert slice_rank_exact_small(identity_tensor(2)) == 2
    assert slice_rank_exact_small(E111) == 1
    assert slice_rank_exact_small(W) == 2
    assert slice_rank_exact_small(cube({})) == 0
    with pytest.raises(ResourceError):
        slice_rank_exact_small(Tensor.zeros((1, 4, 4, 4)))
    with pytest.raises(ResourceError):
        slice_rank_exact_small(Tensor.zeros((1, 2, 2, 2, 2)))
    with pytest.raises(ValueError):
        slice_rank_exact_small(Tensor(np.ones((1, 2, 2, 2), dtype=complex)))


def test_exact_rank_one_layers():
    # e1 (x) M with M of rank 2 has slice rank 1 through the first axis
    X = cube({(0, 0, 0): 1, (0, 1, 1): 1})
    assert slice_rank_exact_small(X) == 1
    # sum of layers through two different axes
    Y = cube({(0, 0, 0): 1, (0, 1, 1): 1, (1, 1, 0): 1, (1, 0, 1): 2}, m=3)
    assert slice_rank_exact_small(Y) <= 2


def test_report_invariants(rng):
    for _ in range(30):
        X = Tensor.from_array(rng.integers(-1, 2, size=(1, 2, 2, 2)))
        rep = slice_rank_report(X)
        assert rep.lower <= rep.exact <= rep.upper <= 2


def test_exact_matches_matrix_rank_d2():
    for vals in itertools.product((-1, 0, 1), repeat=4):
        X = Tensor.from_array(np.array(vals).reshape(1, 2, 2))
        r = sympy.Matrix(2, 2, vals).rank()
        assert slice_rank_exact_small(X, use_shortcuts=False) == r
    rng = np.random.default_rng(3)
    for _ in range(40):
        vals = rng.integers(-1, 2, size=9)
        X = Tensor.from_array(vals.reshape(1, 3, 3))
        r = sympy.Matrix(3, 3, vals.tolist()).rank()
        assert slice_rank_exact_small(X, use_shortcuts=False) == r


def test_exact_d2_all_3x3_with_shortcut():
    for vals in itertools.product((-1, 0, 1), repeat=9):
        arr = np.array(vals).reshape(3, 3)
        X = Tensor.from_array(arr.reshape(1, 3, 3))
        assert slice_rank_exact_small(X) == np.linalg.matrix_rank(arr)


def test_low_slice_rank_implies_null_cone():
    for vals in itertools.product((0, 1), repeat=8):
        X = Tensor.from_array(np.array(vals).reshape(1, 2, 2, 2))
        if slice_rank_exact_small(X) < 2:
            assert scale(X, 1e-3).in_null_cone


def test_instability_from_slice_rank():
    assert instability_from_slice_rank(2, 3) == pytest.approx(0.204124, abs=1e-6)
    assert instability_from_slice_rank(3, 3) < instability_from_slice_rank(2, 3)
    assert instability_from_slice_rank(2, 4) < instability_from_slice_rank(2, 3)
    with pytest.raises(ValueError):
        instability_from_slice_rank(0, 3)
    for X in (E111, cube({(0, 0, 0): 1, (0, 1, 1): 1})):
        assert slice_rank_upper(X) < 2
        assert eps_instability(X, instability_from_slice_rank(2, 3)) is InstabilityVerdict.INSTABILITY_AT_LEAST_EPS


def test_bridge_examples():
    rep = nullcone_vs_slicerank_check(E111)
    assert rep.in_null_cone and rep.slice_rank.exact == 1 and rep.consistent
    rep = nullcone_vs_slicerank_check(diagonal(2, 2))
    assert not rep.in_null_cone and rep.slice_rank.upper == 2 and rep.consistent
    js = rep.to_json()
    assert js["m"] == 2 and js["consistent"] is True


def test_power_preserves_verdict(rng):
    for _ in range(20):
        X = Tensor.from_array(rng.integers(-1, 2, size=(1, 2, 2, 2)))
        if X.is_zero():
            continue
        rep = nullcone_vs_slicerank_check(X)
        assert rep.in_null_cone == rep.power_in_null_cone
        assert rep.consistent
