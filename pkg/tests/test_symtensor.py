"""Symmetric tensor algebra: products, inner product, contractions, Lefschetz pair."""
import random
from fractions import Fraction

import pytest

from hypres.symtensor import (
    SymTensor, TensorError, basis_keys, contract, inner, lambda_kernel_dim,
    lefschetz_L, lefschetz_Lambda, sym_product, trace_free_decompose,
    trace_free_dim, trace_free_part, unit,
)


def e(n, *idx):
    # 1-based labels: e(3, 1, 2) = e1 sigma e2
    return SymTensor.basis(n, [i - 1 for i in idx])


def _random_tensor(rng, n, m, density=0.7):
    coeffs = {K: Fraction(rng.randint(-5, 5), rng.randint(1, 4))
              for K in basis_keys(n, m) if rng.random() < density}
    return SymTensor(n, m, coeffs)


def test_product_unit_and_commutativity():
    v = e(3, 2)
    assert sym_product(SymTensor.scalar(3), v) == v
    u = e(3, 1) + e(3, 3).scale(2)
    w = e(3, 1, 2)
    assert sym_product(u, w) == sym_product(w, u)


def test_inner_examples():
    assert inner(e(2, 1, 1), e(2, 1, 1)) == 2
    assert inner(e(3, 1, 2), e(3, 1, 3)) == 0
    assert inner(SymTensor.scalar(2), SymTensor.scalar(2)) == 1


def test_inner_mixed_product_is_one():
    # permutation-sum formula: only the identity pairing survives
    p = sym_product(e(2, 1), e(2, 2))
    assert inner(p, p) == 1


def test_contract_examples():
    assert contract(e(3, 1), e(3, 1, 2)) == e(3, 2)
    assert contract(e(3, 3), e(3, 1, 2)).is_zero()
    u = e(4, 2)
    assert contract(u, sym_product(u, SymTensor.scalar(4))) == SymTensor.scalar(4)


def test_contract_degree_zero_rejected():
    with pytest.raises(TensorError):
        contract(e(2, 1), SymTensor.scalar(2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lambda_of_L_one(n):
    assert lefschetz_Lambda(lefschetz_L(SymTensor.scalar(n))) == SymTensor.scalar(n, 2 * n)


def test_lefschetz_trivial_cases():
    assert lefschetz_Lambda(e(3, 1, 2)).is_zero()
    assert lefschetz_L(SymTensor.zero(3, 1)).is_zero()


@pytest.mark.parametrize("n,m", [(2, 2), (3, 1), (3, 3), (4, 2)])
def test_adjointness(n, m):
    rng = random.Random(10 * n + m)
    for _ in range(5):
        u = _random_tensor(rng, n, m)
        w = _random_tensor(rng, n, m + 1)
        a = _random_tensor(rng, n, 1)
        assert inner(contract(a, w), u) == inner(w, sym_product(a, u))
        z = _random_tensor(rng, n, m + 2)
        assert inner(lefschetz_L(u), z) == inner(u, lefschetz_Lambda(z))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("m", [0, 1, 2, 3, 4, 5])
def test_trace_free_dimension(n, m):
    assert lambda_kernel_dim(n, m) == trace_free_dim(n, m)


def test_decompose_trace_free_input():
    u = e(3, 1, 2)
    parts = trace_free_decompose(u).parts
    assert parts[0] == (0, u)
    assert all(v.is_zero() for _, v in parts[1:])


def test_decompose_metric():
    d = trace_free_decompose(lefschetz_L(SymTensor.scalar(3)))
    assert d.part(0).is_zero()
    assert d.part(1) == SymTensor.scalar(3)
    assert d.reassemble() == lefschetz_L(SymTensor.scalar(3))


def test_decompose_round_trip_random():
    rng = random.Random(4)
    for _ in range(5):
        u = _random_tensor(rng, 3, 4)
        d = trace_free_decompose(u)
        assert (d.reassemble() - u).is_zero()
        for _, v in d.parts:
            if v.degree >= 2:
                assert lefschetz_Lambda(v).is_zero()
        assert lefschetz_Lambda(trace_free_part(u)).is_zero()


def test_fibre_mismatch():
    with pytest.raises(TensorError):
        inner(e(2, 1), e(3, 1))
    with pytest.raises(TensorError):
        SymTensor(2, 1, {(5,): 1})


def test_unit_vector():
    assert unit(3, 0) == e(3, 1)
