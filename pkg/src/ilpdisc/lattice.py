"""Integer points of rational parallelepipeds with triangular generators."""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterator, List, Sequence, Tuple

from .errors import InvalidShape

HALF_OPEN = "half-open"
CLOSED = "closed"


@dataclass(frozen=True)
class Parallelepiped:
    """The set ``r + H * T`` with ``T = [0,1)^n`` (half-open) or ``[0,1]^n`` (closed)."""

    H: Tuple[Tuple[Fraction, ...], ...]
    r: Tuple[Fraction, ...]
    closure: str = HALF_OPEN

    @classmethod
    def make(cls, H, r, closure=HALF_OPEN):
        p = cls(tuple(tuple(Fraction(x) for x in row) for row in H),
                tuple(Fraction(x) for x in r), closure)
        p.validate()
        return p

    @property
    def dim(self) -> int:
        return len(self.r)

    def validate(self):
        n = len(self.r)
        if len(self.H) != n or any(len(row) != n for row in self.H):
            raise InvalidShape("H must be square and match r")
        for i in range(n):
            if self.H[i][i] <= 0:
                raise InvalidShape(f"diagonal entry {i} is not positive")
            for j in range(i):
                if self.H[i][j] != 0:
                    raise InvalidShape("H must be upper triangular")
        if self.closure not in (HALF_OPEN, CLOSED):
            raise InvalidShape(f"unknown closure {self.closure!r}")


def _integer_range(lo: Fraction, width: Fraction, closed: bool) -> range:
    start = ceil(lo)
    hi = lo + width
    stop = floor(hi) + 1 if closed else ceil(hi)
    return range(start, stop)


def enumerate_points(p: Parallelepiped) -> Iterator[Tuple[int, ...]]:
    """Yield the integer points of ``p``, each once.

    Points come out grouped by the last coordinate first (outermost loop),
    so the order is lexicographic when read from the last coordinate.
    """
    p.validate()
    n = p.dim
    H, r = p.H, p.r
    closed = p.closure == CLOSED
    if n == 0:
        yield ()
        return
    y = [0] * n
    t: List[Fraction] = [Fraction(0)] * n

    def rec(k):
        tau = r[k] + sum((H[k][j] * t[j] for j in range(k + 1, n)), Fraction(0))
        hkk = H[k][k]
        for yk in _integer_range(tau, hkk, closed):
            y[k] = yk
            if k == 0:
                yield tuple(y)
            else:
                t[k] = (yk - tau) / hkk
                yield from rec(k - 1)

    yield from rec(n - 1)


def contains(p: Parallelepiped, x: Sequence[int]) -> bool:
    p.validate()
    n = p.dim
    if len(x) != n:
        raise InvalidShape("point dimension does not match")
    closed = p.closure == CLOSED
    t = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        s = Fraction(x[k]) - p.r[k] - sum((p.H[k][j] * t[j] for j in range(k + 1, n)),
                                          Fraction(0))
        tk = s / p.H[k][k]
        if tk < 0 or tk > 1 or (tk == 1 and not closed):
            return False
        t[k] = tk
    return True


def count_bounds(p: Parallelepiped) -> Tuple[int, int]:
    """Lower/upper bounds on the half-open point count: prod floor, prod ceil."""
    lo = hi = 1
    for i in range(p.dim):
        lo *= floor(p.H[i][i])
        hi *= ceil(p.H[i][i])
    return lo, hi
