"""Normalized LD-preconditioners: small-determinant bases that make columns unit-bounded."""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Tuple

from . import linalg, mvee
from .errors import RankDeficient

# Khachiyan tolerance and square-root precision used when building; both are
# far tighter than eps requires, which only makes delta smaller.
BUILD_MVEE_TOL = 1e-9
BUILD_SQRT_PRECISION = Fraction(2 ** 24 - 1, 2 ** 24)


@dataclass(frozen=True)
class BasisSelection:
    indices: Tuple[int, ...]
    det_abs: Fraction


@dataclass(frozen=True)
class LdPreconditioner:
    B_prime: list
    delta: Fraction
    M: list
    U: list            # unimodular, U @ B_prime == H_enum
    U_inv: list
    H_enum: list
    eps: Fraction
    basis: BasisSelection
    B_inv: list = field(repr=False)
    C: list = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.B_prime)


def _check_rank(A):
    k = len(A)
    if k == 0 or not A[0] or len(A[0]) < k or linalg.rank(A) < k:
        raise RankDeficient("A must have full row rank")


def _gram_det(A, cols) -> int:
    sub = linalg.submatrix_cols(A, cols)
    return linalg.det(linalg.matmul(linalg.transpose(sub), sub))


def select_basis(A) -> BasisSelection:
    """Greedy volume maximisation followed by single-swap local search.

    The result is a nonsingular k-subset of columns on which no single
    exchange increases ``|det|``; such a subset is within a factor ``k!``
    of the largest minor.
    """
    _check_rank(A)
    k, n = len(A), len(A[0])
    chosen: List[int] = []
    for _ in range(k):
        best, best_val = None, 0
        for j in range(n):
            if j in chosen:
                continue
            g = _gram_det(A, chosen + [j])
            if g > best_val:
                best, best_val = j, g
        if best is None:
            raise RankDeficient("A must have full row rank")
        chosen.append(best)

    def vol(cols):
        return abs(linalg.det(linalg.submatrix_cols(A, sorted(cols))))

    cur = vol(chosen)
    improved = True
    while improved:
        improved = False
        for pos in range(k):
            for j in range(n):
                if j in chosen:
                    continue
                trial = chosen[:pos] + [j] + chosen[pos + 1:]
                v = vol(trial)
                if v > cur:
                    chosen, cur, improved = trial, v, True
                    break
            if improved:
                break
    return BasisSelection(tuple(sorted(chosen)), Fraction(cur))


def delta_exact(A) -> int:
    """Largest absolute k x k minor, by enumerating all column subsets."""
    _check_rank(A)
    k, n = len(A), len(A[0])
    best = 0
    for cols in combinations(range(n), k):
        best = max(best, abs(linalg.det(linalg.submatrix_cols(A, cols))))
    if best == 0:
        raise RankDeficient("A must have full row rank")
    return best


def build(A, eps=mvee.DEFAULT_EPS) -> LdPreconditioner:
    eps = Fraction(eps)
    sel = select_basis(A)
    A_sel = linalg.submatrix_cols(A, sel.indices)
    A_sel_inv = linalg.inverse(A_sel)
    pts = mvee.PointSet.from_columns(linalg.matmul(A_sel_inv, A))
    ell = mvee.solve_mvee(pts, eps, tol=min(BUILD_MVEE_TOL, float(eps) / pts.dim))
    tri = mvee.round_to_triangular(ell, pts, eps, precision=BUILD_SQRT_PRECISION)
    B = linalg.inverse(tri.C)
    B_prime = linalg.matmul(linalg.to_fractions(A_sel), B)
    B_inv = linalg.matmul(tri.C, A_sel_inv)
    M = linalg.matmul(B_inv, A)
    h = linalg.hnf(B_prime)
    delta = abs(Fraction(linalg.det(B_prime)))
    return LdPreconditioner(
        B_prime=B_prime,
        delta=delta,
        M=M,
        U=[[int(x) for x in row] for row in linalg.inverse(h.U)],
        U_inv=h.U,
        H_enum=[[Fraction(x) for x in row] for row in h.H],
        eps=eps,
        basis=sel,
        B_inv=B_inv,
        C=tri.C,
    )


def check_invariants(pre: LdPreconditioner) -> None:
    """Assert every structural promise of a built preconditioner (exactly)."""
    k = pre.k
    for j in range(len(pre.M[0])):
        assert sum(pre.M[i][j] ** 2 for i in range(k)) <= 1
    assert pre.delta == abs(Fraction(linalg.det(pre.B_prime))) > 0
    assert abs(linalg.det(pre.U)) == 1
    assert linalg.matmul(pre.U, pre.B_prime) == pre.H_enum
    for i in range(k):
        assert pre.H_enum[i][i] >= 1
        for j in range(i):
            assert pre.H_enum[i][j] == 0


def from_basis(B_prime) -> LdPreconditioner:
    """Wrap a given nonsingular ``B'`` (no ``A`` attached) for window construction.

    Only the fields used by window enumeration are meaningful: ``M`` is empty
    and ``C`` is ``B'^{-1}``.
    """
    B_prime = linalg.to_fractions(B_prime)
    k = len(B_prime)
    h = linalg.hnf(B_prime)
    B_inv = linalg.inverse(B_prime)
    return LdPreconditioner(
        B_prime=B_prime,
        delta=abs(Fraction(linalg.det(B_prime))),
        M=[[] for _ in range(k)],
        U=[[int(x) for x in row] for row in linalg.inverse(h.U)],
        U_inv=h.U,
        H_enum=[[Fraction(x) for x in row] for row in h.H],
        eps=mvee.DEFAULT_EPS,
        basis=BasisSelection(tuple(range(k)), abs(Fraction(linalg.det(B_prime)))),
        B_inv=B_inv,
        C=B_inv,
    )
