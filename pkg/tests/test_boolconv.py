import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ilpdisc import boolconv as bc
from ilpdisc.errors import DimMismatch, OutOfRange


def fn(*pts):
    return bc.SparseBoolFn.from_points(len(pts[0]), pts)


def test_naive_examples():
    assert bc.convolve_naive(fn((0, 0)), fn((1, 2))).support == {(1, 2)}
    assert bc.convolve_naive(fn((0,), (1,)), fn((0,), (1,))).support == {(0,), (1,), (2,)}


def test_encoded_examples():
    assert bc.convolve_encoded(fn((0, 0)), fn((1, 2))).support == {(1, 2)}
    assert bc.convolve_encoded(fn((-1,), (1,)), fn((-1,), (1,))).support == {(-2,), (0,), (2,)}


def test_dim_mismatch():
    with pytest.raises(DimMismatch):
        bc.convolve_naive(fn((0,)), fn((0, 0)))
    with pytest.raises(DimMismatch):
        bc.convolve_encoded(fn((0,)), fn((0, 0)))


def test_encode_examples():
    assert bc.encode_base_q((1, -2), 2) == 3
    assert bc.encode_base_q((0, 0, 0), 1) == 31
    with pytest.raises(OutOfRange):
        bc.encode_base_q((3,), 2)


def test_naive_random_small():
    rng = random.Random(2)
    for _ in range(30):
        a = [tuple(rng.randint(-5, 5) for _ in range(3)) for _ in range(rng.randint(1, 20))]
        b = [tuple(rng.randint(-5, 5) for _ in range(3)) for _ in range(rng.randint(1, 20))]
        want = {tuple(x + y for x, y in zip(p, r)) for p in a for r in b}
        assert bc.convolve_naive(fn(*a), fn(*b)).support == want


@pytest.mark.parametrize("k,L", [(k, L) for k in (1, 2, 3) for L in (1, 2, 3)])
def test_encoding_exhaustive(k, L):
    box = list(product(range(-L, L + 1), repeat=k))
    codes = [bc.encode_base_q(x, L) for x in box]
    assert len(set(codes)) == len(box)
    q = 4 * L + 1
    for x, cx in zip(box, codes):
        for y, cy in zip(box, codes):
            s = cx + cy
            digits = []
            for _ in range(k):
                s, d = divmod(s, q)
                digits.append(d)
            assert s == 0
            assert digits == [a + b + 2 * L for a, b in zip(x, y)]


@given(st.integers(1, 4), st.integers(0, 8), st.data())
def test_decode_round_trip(k, L, data):
    vec = st.lists(st.integers(-L, L), min_size=k, max_size=k)
    x, y = data.draw(vec), data.draw(vec)
    s = bc.encode_base_q(x, L) + bc.encode_base_q(y, L)
    assert bc.decode_base_q(s, L, k, 2 * L) == tuple(a + b for a, b in zip(x, y))


@st.composite
def fn_pairs(draw, max_k=4, max_L=8, max_size=40):
    k = draw(st.integers(1, max_k))
    L = draw(st.integers(0, max_L))
    pt = st.tuples(*[st.integers(-L, L)] * k)
    a = draw(st.lists(pt, min_size=1, max_size=max_size))
    b = draw(st.lists(pt, min_size=1, max_size=max_size))
    return fn(*a), fn(*b)


@given(fn_pairs())
def test_backend_equivalence(ab):
    a, b = ab
    assert bc.convolve_encoded(a, b).support == bc.convolve_naive(a, b).support


@given(fn_pairs())
def test_commutative(ab):
    a, b = ab
    assert bc.convolve_encoded(a, b).support == bc.convolve_encoded(b, a).support


@given(fn_pairs())
def test_identity(ab):
    a, _ = ab
    delta = fn(tuple([0] * a.dim))
    assert bc.convolve_encoded(a, delta).support == a.support


def test_sparse_path_above_dense_limit():
    # q^k > DENSE_LIMIT forces the hashed sumset path
    a = fn((-40, 0, 0, 0, 0), (40, 1, -1, 2, 3))
    b = fn((1, 1, 1, 1, 1), (0, 0, 0, 0, -40))
    assert (4 * 40 + 1) ** 5 > bc.DENSE_LIMIT
    assert bc.convolve_encoded(a, b).support == bc.convolve_naive(a, b).support


def test_bigint_path():
    L = 10 ** 6
    a = fn((L, -L, 0), (0, 1, 2))
    b = fn((-L, L, 5), (3, 3, 3))
    assert bc.convolve_encoded(a, b).support == bc.convolve_naive(a, b).support


@given(fn_pairs(max_k=3, max_L=6, max_size=30))
def test_sumset_points(ab):
    a, b = ab
    pa = np.array(sorted(a.support), dtype=np.int64)
    pb = np.array(sorted(b.support), dtype=np.int64)
    out = bc.sumset_points(pa, pb)
    rows = [tuple(int(v) for v in r) for r in out]
    assert rows == sorted(bc.convolve_naive(a, b).support)
