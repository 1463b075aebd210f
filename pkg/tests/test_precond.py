import random
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from ilpdisc import lattice, linalg, mvee, oracle, precond
from ilpdisc.errors import RankDeficient


def full_rank(rng, k, n, lo=-4, hi=4):
    while True:
        A = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(k)]
        if linalg.rank(A) == k:
            return A


def test_select_basis_examples():
    sel = precond.select_basis([[1, 0, 5], [0, 1, 0]])
    assert sel.det_abs == 5 and set(sel.indices) == {1, 2}
    sel = precond.select_basis([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert sel.det_abs == 1


def test_select_basis_factorial_approximation():
    rng = random.Random(7)
    for _ in range(25):
        A = full_rank(rng, 3, 6)
        sel = precond.select_basis(A)
        assert sel.det_abs * factorial(3) >= oracle.delta_brute(A)
        # local optimality: no single swap improves
        for pos in range(3):
            for j in set(range(6)) - set(sel.indices):
                trial = sorted(sel.indices[:pos] + (j,) + sel.indices[pos + 1:])
                assert abs(linalg.det(linalg.submatrix_cols(A, trial))) <= sel.det_abs


def test_rank_deficient():
    with pytest.raises(RankDeficient):
        precond.select_basis([[1, 2], [2, 4]])
    with pytest.raises(RankDeficient):
        precond.build([[1, 2, 3], [2, 4, 6]])
    with pytest.raises(RankDeficient):
        precond.delta_exact([[0, 0]])


def test_delta_exact_examples():
    assert precond.delta_exact([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 1
    assert precond.delta_exact([[1, 0, 5], [0, 1, 7]]) == 7
    A = [[1, 0, 5], [0, 1, 7]]
    dup = [row + [row[2]] for row in A]
    assert precond.delta_exact(dup) == 7


def test_build_identity():
    for k in (1, 2, 3):
        A = [[int(i == j) for j in range(k)] for i in range(k)]
        pre = precond.build(A)
        precond.check_invariants(pre)
        assert pre.delta <= mvee.exp_upper(Fraction(k, 2) + 2)
    assert precond.build([[1, 0], [0, 1]]).delta <= mvee.exp_upper(3)


def test_build_unit_columns():
    pre = precond.build([[1, 0, 3], [0, 1, 4]])
    precond.check_invariants(pre)
    for j in range(3):
        assert pre.M[0][j] ** 2 + pre.M[1][j] ** 2 <= 1


def test_build_matches_definitions():
    pre = precond.build([[2, 1, -1, 3], [1, 3, 2, 0]])
    assert linalg.matmul(pre.B_prime, pre.M) == linalg.to_fractions([[2, 1, -1, 3], [1, 3, 2, 0]])
    assert linalg.matmul(pre.B_inv, pre.B_prime) == linalg.identity(2)
    assert linalg.matmul(pre.U, pre.U_inv) == linalg.identity(2)


def test_determinant_bound_random():
    rng = random.Random(21)
    for _ in range(15):
        k = rng.randint(1, 3)
        A = full_rank(rng, k, rng.randint(k, 7))
        pre = precond.build(A)
        precond.check_invariants(pre)
        bound = mvee.exp_upper(Fraction(k, 2) + 2 * pre.eps) * factorial(k) * oracle.delta_brute(A)
        assert pre.delta <= bound


@st.composite
def matrices(draw):
    k = draw(st.integers(1, 3))
    n = draw(st.integers(k, 6))
    return [[draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(k)]


@given(matrices())
def test_invariants_property(A):
    if linalg.rank(A) < len(A):
        return
    precond.check_invariants(precond.build(A))


def test_enumeration_through_hnf():
    rng = random.Random(4)
    for _ in range(8):
        k = rng.randint(1, 3)
        pre = precond.build(full_rank(rng, k, k + 2, -2, 2))
        for gamma in (1, 2):
            r = [Fraction(rng.randint(-6, 6), 5) for _ in range(k)]
            # integer points of r + gamma B' [0,1)^k, pulled back through U
            H = [[gamma * x for x in row] for row in pre.H_enum]
            inner = lattice.enumerate_points(
                lattice.Parallelepiped.make(H, linalg.matvec(pre.U, r)))
            pts = {tuple(int(v) for v in linalg.matvec(pre.U_inv, y)) for y in inner}
            # reference: scan the box of the same set, membership via B'^{-1}
            Bg = [[gamma * x for x in row] for row in pre.B_prime]
            assert pts == box_scan_general(Bg, r)


def box_scan_general(B, r):
    from itertools import product
    from math import ceil, floor
    k = len(r)
    Binv = linalg.inverse(B)
    ranges = []
    for i in range(k):
        lo = r[i] + sum(min(Fraction(0), v) for v in B[i])
        hi = r[i] + sum(max(Fraction(0), v) for v in B[i])
        ranges.append(range(ceil(lo), floor(hi) + 1))
    out = set()
    for x in product(*ranges):
        t = linalg.matvec(Binv, [Fraction(v) - ri for v, ri in zip(x, r)])
        if all(0 <= v < 1 for v in t):
            out.add(tuple(x))
    return out
