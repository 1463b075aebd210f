"""Exact integer/rational matrix routines.

Matrices are plain row-major lists of lists holding ``int`` or
``fractions.Fraction`` entries.  Nothing here touches floating point.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import List, Sequence

from .errors import NotPositiveDefinite, SingularMatrix

Matrix = List[List]


@dataclass(frozen=True)
class HnfResult:
    U: Matrix   # unimodular, integer
    H: Matrix   # upper triangular, positive diagonal


@dataclass(frozen=True)
class LdlResult:
    L: Matrix   # unit upper triangular
    D: List[Fraction]


def shape(m: Sequence[Sequence]) -> tuple:
    return (len(m), len(m[0]) if m else 0)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def to_fractions(m) -> Matrix:
    return [[Fraction(v) for v in row] for row in m]


def transpose(m) -> Matrix:
    return [list(col) for col in zip(*m)]


def matmul(a, b) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def column(m, j: int) -> list:
    return [row[j] for row in m]


def submatrix_cols(m, cols) -> Matrix:
    return [[row[j] for j in cols] for row in m]


def is_integral(m) -> bool:
    return all(isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)
               for row in m for v in row)


def _require_square(m):
    r, c = shape(m)
    if r != c:
        raise ValueError(f"square matrix expected, got {r}x{c}")
    return r


def _bareiss_det(m) -> int:
    n = len(m)
    a = [[int(v) for v in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return sign * a[n - 1][n - 1] if n else 1


def _gauss_det(m) -> Fraction:
    n = len(m)
    a = to_fractions(m)
    result = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            result = -result
        piv = a[k][k]
        result *= piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return result


def det(m):
    """Exact determinant.  Integer input returns ``int``, otherwise ``Fraction``."""
    n = _require_square(m)
    if n == 0:
        return 1
    if is_integral(m):
        return _bareiss_det(m)
    return _gauss_det(m)


def inverse(m) -> Matrix:
    n = _require_square(m)
    a = [to_fractions([row])[0] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        a[k] = [v / piv for v in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [row[n:] for row in a]


def rank(m) -> int:
    if not m or not m[0]:
        return 0
    if is_integral(m):
        # fraction-free elimination
        a = [[int(v) for v in row] for row in m]
        rows, cols = shape(a)
        r = 0
        for c in range(cols):
            p = next((i for i in range(r, rows) if a[i][c] != 0), None)
            if p is None:
                continue
            a[r], a[p] = a[p], a[r]
            for i in range(r + 1, rows):
                if a[i][c]:
                    f, g = a[r][c], a[i][c]
                    a[i] = [f * x - g * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == rows:
                break
        return r
    a = to_fractions(m)
    rows, cols = shape(a)
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(r + 1, rows):
            f = a[i][c] / a[r][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def xgcd(a: int, b: int):
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def _integer_hnf(m):
    n = len(m)
    h = [[int(v) for v in row] for row in m]
    v = identity(n)          # invariant: v * m == h
    for j in range(n):
        for i in range(j + 1, n):
            if h[i][j] == 0:
                continue
            a, b = h[j][j], h[i][j]
            g, s, t = xgcd(a, b)
            p, q = -b // g, a // g
            for mat in (h, v):
                rj, ri = mat[j], mat[i]
                mat[j] = [s * x + t * y for x, y in zip(rj, ri)]
                mat[i] = [p * x + q * y for x, y in zip(rj, ri)]
        if h[j][j] == 0:
            raise SingularMatrix("matrix is singular")
        if h[j][j] < 0:
            h[j] = [-x for x in h[j]]
            v[j] = [-x for x in v[j]]
        d = h[j][j]
        for i in range(j):
            q = h[i][j] // d
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[j])]
                v[i] = [x - q * y for x, y in zip(v[i], v[j])]
    u = [[int(x) for x in row] for row in inverse(v)]
    return u, h


def hnf(m) -> HnfResult:
    """Factor a nonsingular square matrix as ``m == U @ H``.

    ``H`` is upper triangular with positive diagonal and every entry above the
    diagonal reduced into ``[0, H[j][j])`` of its column.  Rational input is
    handled by clearing denominators first.
    """
    n = _require_square(m)
    if n == 0:
        return HnfResult([], [])
    d = 1
    for row in m:
        for x in row:
            d = lcm(d, Fraction(x).denominator)
    scaled = [[int(Fraction(x) * d) for x in row] for row in m]
    if _bareiss_det(scaled) == 0:
        raise SingularMatrix("matrix is singular")
    u, h = _integer_hnf(scaled)
    if d == 1:
        return HnfResult(u, h)
    return HnfResult(u, [[Fraction(x, d) for x in row] for row in h])


def ldl(m) -> LdlResult:
    """Factor a symmetric positive definite matrix as ``L^T diag(D) L``."""
    n = _require_square(m)
    a = to_fractions(m)
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D: List[Fraction] = []
    for j in range(n):
        dj = a[j][j] - sum(L[l][j] ** 2 * D[l] for l in range(j))
        if dj <= 0:
            raise NotPositiveDefinite(f"pivot {j} is {dj}")
        D.append(dj)
        for i in range(j + 1, n):
            s = a[j][i] - sum(L[l][j] * D[l] * L[l][i] for l in range(j))
            L[j][i] = s / dj
    return LdlResult(L, D)


def common_denominator(m) -> int:
    d = 1
    for row in m:
        for x in row:
            d = lcm(d, Fraction(x).denominator)
    return d


def content(vec) -> int:
    g = 0
    for x in vec:
        g = gcd(g, int(x))
    return g
