"""Bounding-box scan used as the reference for parallelepiped enumeration."""

from fractions import Fraction
from itertools import product
from math import ceil, floor

from ilpdisc import linalg


def box_scan(H, r, closed=False):
    n = len(r)
    H = linalg.to_fractions(H)
    r = [Fraction(v) for v in r]
    Hinv = linalg.inverse(H)
    ranges = []
    for i in range(n):
        lo = r[i] + sum(min(Fraction(0), h) for h in H[i])
        hi = r[i] + sum(max(Fraction(0), h) for h in H[i])
        ranges.append(range(ceil(lo), floor(hi) + 1))
    out = set()
    for x in product(*ranges):
        t = linalg.matvec(Hinv, [Fraction(v) - ri for v, ri in zip(x, r)])
        if all(0 <= v <= 1 for v in t) and (closed or all(v < 1 for v in t)):
            out.add(tuple(x))
    return out
