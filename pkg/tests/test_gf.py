from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fountain_cache.gf import PRIMITIVE_POLYS, SUPPORTED_ORDERS, Field, FieldError, field_for_order, field_new


def clmul_mod(a: int, b: int, m: int, poly: int) -> int:
    """Schoolbook carry-less multiply then reduce; independent of the tables."""
    r = 0
    for i in range(m):
        if (b >> i) & 1:
            r ^= a << i
    for d in range(2 * m - 2, m - 1, -1):
        if (r >> d) & 1:
            r ^= poly << (d - m)
    return r


@pytest.mark.parametrize("m", range(1, 9))
def test_mul_table_matches_schoolbook(m):
    f = field_new(m)
    for a in range(f.q):
        for b in range(f.q):
            assert f.mul(a, b) == clmul_mod(a, b, m, PRIMITIVE_POLYS[m])
            assert f.mul_table[a, b] == f.mul(a, b)


@pytest.mark.parametrize("m", range(1, 9))
def test_field_axioms_exhaustive(m):
    f = field_new(m)
    T = f.mul_table.astype(np.int64)
    els = np.arange(f.q)
    assert np.array_equal(T, T.T)
    assert np.array_equal(T[1], els)
    assert not T[0].any()
    # associativity: (a b) c == a (b c) for all triples
    assert np.array_equal(T[T[:, :, None], els[None, None, :]], T[els[:, None, None], T[None, :, :]])
    # distributivity over XOR
    lhs = T[els[:, None, None], els[None, :, None] ^ els[None, None, :]]
    rhs = T[:, :, None] ^ T[:, None, :]
    assert np.array_equal(lhs, rhs)
    for a in range(1, f.q):
        assert f.mul(a, f.inv(a)) == 1
        assert f.div(a, a) == 1


def test_known_products():
    assert field_new(2).mul(2, 2) == 3
    assert field_new(8).mul(0x53, 0xCA) == clmul_mod(0x53, 0xCA, 8, 0b100011101)
    assert field_new(1).mul(1, 1) == 1


def test_generator_order():
    f = field_new(8)
    assert f.pow(2, 255) == 1
    assert all(f.pow(2, e) != 1 for e in range(1, 255))
    assert f.pow(7, -1) == f.inv(7)


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        field_new(4).inv(0)


def test_bad_degree_and_order():
    for m in (0, 9, -1):
        with pytest.raises(FieldError):
            Field(m)
    with pytest.raises(FieldError):
        field_for_order(3)
    with pytest.raises(FieldError):
        field_new(4).add(16, 1)


def test_supported_orders():
    assert SUPPORTED_ORDERS == (2, 4, 8, 16, 32, 64, 128, 256)
    for q in SUPPORTED_ORDERS:
        assert field_for_order(q).q == q


@pytest.mark.parametrize("q", [2, 16, 256])
def test_sampling_is_uniform(q):
    f = field_for_order(q)
    n = 200 * q
    counts = np.bincount(f.random(np.random.default_rng(q), n), minlength=q)
    chi2 = ((counts - 200) ** 2 / 200).sum()
    # 99.9% quantile of chi-square with q-1 dof is below q - 1 + 5 sqrt(2(q-1)) + 10
    assert chi2 < q - 1 + 5 * np.sqrt(2 * (q - 1)) + 10
    assert all(0 <= f.sample_uniform(np.random.default_rng(i)) < q for i in range(20))


@given(st.integers(1, 8), st.data())
def test_dot_matches_scalar_loop(m, data):
    f = field_new(m)
    n = data.draw(st.integers(0, 20))
    a = data.draw(st.lists(st.integers(0, f.q - 1), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(0, f.q - 1), min_size=n, max_size=n))
    acc = 0
    for x, y in zip(a, b):
        acc = f.add(acc, f.mul(x, y))
    assert f.dot(np.array(a, dtype=np.uint8), np.array(b, dtype=np.uint8)) == acc


def test_addition_is_xor():
    f = field_new(3)
    for a, b in itertools.product(range(8), repeat=2):
        assert f.add(a, b) == f.sub(a, b) == a ^ b
