"""Approximate 0-symmetric minimum-volume enclosing ellipsoids with exact certificates.

The optimisation itself runs in floating point (Khachiyan coordinate ascent
with Todd-Yildirim away steps on the dual weights).  Everything that is
*claimed* about the result is then re-established in rational arithmetic:
primal feasibility after an exact shrink, the duality certificate, and the
triangular factor used for preconditioning.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import List, Sequence

import numpy as np

from . import linalg
from .errors import DegeneratePoints, NonPositiveInput

DEFAULT_EPS = Fraction(1)
DEFAULT_MAX_ITER = 100_000
_GRID = 2 ** 40


@dataclass(frozen=True)
class PointSet:
    """Finite point set, read as the symmetric set of all ``+a`` and ``-a``."""

    dim: int
    points: tuple

    @classmethod
    def from_columns(cls, m) -> "PointSet":
        k = len(m)
        cols = tuple(tuple(Fraction(row[j]) for row in m) for j in range(len(m[0])))
        return cls(k, cols)

    def matrix(self) -> list:
        return [[p[i] for p in self.points] for i in range(self.dim)]


@dataclass(frozen=True)
class RationalEllipsoid:
    W_hat: list
    dual_weights: tuple
    gap_bound: Fraction
    iterations: int = 0


@dataclass(frozen=True)
class TriangularFactor:
    C: list
    eps: Fraction


# exponential bounds ---------------------------------------------------------

def _series_terms(x: Fraction):
    return 2 * math.ceil(abs(x)) + 16


def exp_lower(x) -> Fraction:
    """A rational number ``<= e**x``."""
    x = Fraction(x)
    if x < 0:
        return 1 / exp_upper(-x)
    n = _series_terms(x)
    term, total = Fraction(1), Fraction(1)
    for i in range(1, n + 1):
        term = term * x / i
        total += term
    return total


def exp_upper(x) -> Fraction:
    """A rational number ``>= e**x``."""
    x = Fraction(x)
    if x < 0:
        return 1 / exp_lower(-x)
    n = _series_terms(x)
    term, total = Fraction(1), Fraction(1)
    for i in range(1, n + 1):
        term = term * x / i
        total += term
    # tail sum_{i>n} x^i/i! <= x^(n+1)/(n+1)! * (n+2)/(n+2-x) for x < n+2
    tail = term * x / (n + 1) * Fraction(n + 2) / (n + 2 - x)
    return total + tail


def rational_sqrt_lower(x, factor) -> Fraction:
    """Dyadic ``r`` with ``factor * sqrt(x) <= r <= sqrt(x)``."""
    x, factor = Fraction(x), Fraction(factor)
    if x <= 0:
        raise NonPositiveInput(f"x must be positive, got {x}")
    if not 0 < factor < 1:
        raise ValueError("factor must lie in (0, 1)")
    target = factor * factor * x
    p = 0
    while True:
        scale = 1 << p
        # floor(sqrt(x)*scale) computed exactly from floor(x*scale^2)
        r = Fraction(isqrt(x.numerator * scale * scale // x.denominator), scale)
        if r > 0 and r * r >= target:
            return r
        p += 1


# certificates ------------------------------------------------------------------

def quad_form(W, a) -> Fraction:
    return sum(a[i] * W[i][j] * a[j] for i in range(len(a)) for j in range(len(a)))


def dual_matrix(pts: PointSet, weights) -> list:
    k = pts.dim
    X = [[Fraction(0)] * k for _ in range(k)]
    for c, a in zip(weights, pts.points):
        if c:
            for i in range(k):
                for j in range(k):
                    X[i][j] += c * a[i] * a[j]
    return X


def _log_rational(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def primal_value(W) -> float:
    """``-ln det W``."""
    return -_log_rational(Fraction(linalg.det(W)))


def dual_value(pts: PointSet, weights) -> float:
    """``ln det(sum c_i a_i a_i^T)``."""
    return _log_rational(Fraction(linalg.det(dual_matrix(pts, weights))))


def duality_product(e: RationalEllipsoid, pts: PointSet) -> Fraction:
    """``det(sum c_i a_i a_i^T) * det(W_hat)``; weak duality says this is <= 1."""
    return Fraction(linalg.det(dual_matrix(pts, e.dual_weights))) * Fraction(linalg.det(e.W_hat))


# solver ------------------------------------------------------------------------------

def _khachiyan(P: np.ndarray, tol: float, max_iter: int):
    k, n = P.shape
    u = np.full(n, 1.0 / n)
    it = 0
    while True:
        X = (P * u) @ P.T
        Xinv = np.linalg.inv(X)
        M = np.einsum("in,ij,jn->n", P, Xinv, P)
        j = int(np.argmax(M))
        m_plus = M[j]
        if m_plus <= k * (1 + tol) or it >= max_iter:
            return u, X, M, it
        support = np.nonzero(u > 0)[0]
        jm = support[int(np.argmin(M[support]))]
        m_minus = M[jm]
        if m_plus - k >= k - m_minus:
            lam = (m_plus / k - 1) / (m_plus - 1)
            u = (1 - lam) * u
            u[j] += lam
        else:
            # away step, clipped so the weight stays nonnegative
            lam = min((1 - m_minus / k) / (m_minus - 1) if m_minus > 1 else np.inf,
                      u[jm] / (1 - u[jm]) if u[jm] < 1 else np.inf)
            u = (1 + lam) * u
            u[jm] -= lam
            u[jm] = max(u[jm], 0.0)
        it += 1


def solve_mvee(pts: PointSet, eps=DEFAULT_EPS, max_iter: int = DEFAULT_MAX_ITER,
               tol=None) -> RationalEllipsoid:
    """Near-optimal feasible ``W_hat`` for the Loewner ellipsoid of ``{+-a_i}``.

    ``tol`` is the relative Khachiyan gap at which iteration stops; it
    defaults to ``eps / k`` which certifies ``-ln det W_hat <= OPT + eps``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k, n = pts.dim, len(pts.points)
    if n < k or k < 1 or linalg.rank(pts.matrix()) < k:
        raise DegeneratePoints("points do not span the space")
    if tol is None:
        tol = float(eps) / k
    P = np.array([[float(a[i]) for a in pts.points] for i in range(k)])
    u, X, M, iters = _khachiyan(P, tol, max_iter)

    # rational dual weights with sum exactly k
    ur = [Fraction(round(float(x) * _GRID), _GRID) if x > 0 else Fraction(0) for x in u]
    total = sum(ur)
    weights = tuple(k * w / total for w in ur)

    Wf = np.linalg.inv(X) / float(np.max(M))
    Wf = (Wf + Wf.T) / 2
    W = [[Fraction(round(Wf[i][j] * _GRID), _GRID) for j in range(k)] for i in range(k)]
    for i in range(k):
        for j in range(i):
            W[i][j] = W[j][i]
    worst = max(quad_form(W, a) for a in pts.points)
    if worst > 1:
        W = [[w / worst for w in row] for row in W]

    gap = primal_value(W) - dual_value(pts, weights)
    gap_bound = Fraction(max(gap, 0.0) + 1e-12).limit_denominator(10 ** 12)
    return RationalEllipsoid(W, weights, gap_bound, iters)


def round_to_triangular(e: RationalEllipsoid, pts: PointSet, eps=DEFAULT_EPS,
                        precision=None) -> TriangularFactor:
    """Exact upper-triangular ``C`` with ``C^T C <= W_hat`` in the Loewner order.

    ``precision`` optionally tightens the per-diagonal square-root factor
    beyond ``e^{-eps/k}``.
    """
    eps = Fraction(eps)
    k = pts.dim
    dec = linalg.ldl(e.W_hat)
    factor = exp_lower(-eps / k)
    if precision is not None:
        factor = max(factor, Fraction(precision))
    d = [rational_sqrt_lower(x, factor) for x in dec.D]
    C = [[d[i] * dec.L[i][j] for j in range(k)] for i in range(k)]
    for a in pts.points:
        Ca = linalg.matvec(C, a)
        assert sum(x * x for x in Ca) <= 1, "containment lost in rounding"
    return TriangularFactor(C, eps)


def column_norms_sq(C, pts: PointSet) -> List[Fraction]:
    out = []
    for a in pts.points:
        Ca = linalg.matvec(C, a)
        out.append(sum(x * x for x in Ca))
    return out
