"""Sparse Boolean convolution (support sumsets) on Z^k.

Vectors in ``[-L, L]^k`` are packed into single integers with base
``q = 4L + 1`` digits; sums of two codes never carry, so a k-dimensional
sumset becomes a one-dimensional one.
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Tuple

import numpy as np
from scipy.signal import fftconvolve

from .errors import DimMismatch, OutOfRange

# largest q^k for which the dense FFT path is used
DENSE_LIMIT = 1 << 22
# codes must stay below this to use int64 arrays
NATIVE_LIMIT = 1 << 62
_CHUNK = 1 << 22

Vec = Tuple[int, ...]


@dataclass(frozen=True)
class SparseBoolFn:
    dim: int
    support: FrozenSet[Vec]
    bound: int

    @classmethod
    def from_points(cls, dim: int, points: Iterable[Iterable[int]]) -> "SparseBoolFn":
        sup = frozenset(tuple(int(v) for v in p) for p in points)
        for p in sup:
            if len(p) != dim:
                raise DimMismatch(f"point {p} is not {dim}-dimensional")
        bound = max((max(map(abs, p), default=0) for p in sup), default=0)
        return cls(dim, sup, bound)


def _check(a: SparseBoolFn, b: SparseBoolFn):
    if a.dim != b.dim:
        raise DimMismatch(f"{a.dim} != {b.dim}")


def convolve_naive(a: SparseBoolFn, b: SparseBoolFn) -> SparseBoolFn:
    _check(a, b)
    out = {tuple(x + y for x, y in zip(p, r)) for p in a.support for r in b.support}
    return SparseBoolFn.from_points(a.dim, out)


def encode_base_q(x: Iterable[int], L: int) -> int:
    q = 4 * L + 1
    code = 0
    for i, v in enumerate(x):
        if abs(v) > L:
            raise OutOfRange(f"|{v}| exceeds bound {L}")
        code += (v + L) * q ** i
    return code


def decode_base_q(code: int, L: int, k: int, offset: int) -> Vec:
    """Invert a (possibly summed) code; ``offset`` is ``L`` for one code, ``2L`` for a sum."""
    q = 4 * L + 1
    out = []
    for _ in range(k):
        code, digit = divmod(code, q)
        out.append(digit - offset)
    return tuple(out)


def _encode_array(points: np.ndarray, L: int) -> np.ndarray:
    q = 4 * L + 1
    weights = q ** np.arange(points.shape[1], dtype=np.int64)
    return (points.astype(np.int64) + L) @ weights


def _decode_array(codes: np.ndarray, L: int, k: int) -> np.ndarray:
    q = 4 * L + 1
    out = np.empty((len(codes), k), dtype=np.int64)
    rest = codes.copy()
    for i in range(k):
        out[:, i] = rest % q - 2 * L
        rest //= q
    return out


def sumset_codes(ca: np.ndarray, cb: np.ndarray, universe: int) -> np.ndarray:
    """Sorted distinct values of ``ca[i] + cb[j]``, all inside ``[0, universe)``."""
    if len(ca) == 0 or len(cb) == 0:
        return np.empty(0, dtype=np.int64)
    if universe <= DENSE_LIMIT:
        fa = np.zeros(universe, dtype=np.float64)
        fb = np.zeros(universe, dtype=np.float64)
        fa[ca] = 1.0
        fb[cb] = 1.0
        prod = fftconvolve(fa, fb)
        return np.nonzero(prod > 0.5)[0].astype(np.int64)
    parts = []
    step = max(1, _CHUNK // len(cb))
    for s in range(0, len(ca), step):
        parts.append(np.unique(np.add.outer(ca[s:s + step], cb).ravel()))
    return np.unique(np.concatenate(parts))


def convolve_points(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Sumset of two integer point arrays (rows), via the carry-free encoding."""
    k = pa.shape[1]
    if len(pa) == 0 or len(pb) == 0:
        return np.empty((0, k), dtype=np.int64)
    L = int(max(np.abs(pa).max(), np.abs(pb).max()))
    q = 4 * L + 1
    if q ** k >= NATIVE_LIMIT:
        a = SparseBoolFn.from_points(k, map(tuple, pa.tolist()))
        b = SparseBoolFn.from_points(k, map(tuple, pb.tolist()))
        res = _convolve_bigint(a, b, L)
        return np.array(sorted(res), dtype=object).reshape(-1, k)
    codes = sumset_codes(_encode_array(pa, L), _encode_array(pb, L), q ** k)
    return _decode_array(codes, L, k)


def sumset_points(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    """Sumset of two point arrays with a per-coordinate (mixed) radix.

    Each coordinate is shifted to start at 0; with digit ranges ``[0, e_d]``
    the radix ``2 e_d + 1`` is already carry-free, which keeps the packed
    universe as small as the bounding box of the sums.  Rows come back in
    lexicographic order.
    """
    k = pa.shape[1]
    if len(pa) == 0 or len(pb) == 0:
        return np.empty((0, k), dtype=np.int64)
    pa = np.asarray(pa, dtype=np.int64)
    pb = np.asarray(pb, dtype=np.int64)
    lo = np.minimum(pa.min(axis=0), pb.min(axis=0))
    ext = np.maximum(pa.max(axis=0), pb.max(axis=0)) - lo
    radix = [int(2 * e + 1) for e in ext]
    universe = 1
    for r in radix:
        universe *= r
    if universe >= NATIVE_LIMIT:
        return convolve_points(pa, pb)
    weights = np.ones(k, dtype=np.int64)
    for d in range(k - 2, -1, -1):
        weights[d] = weights[d + 1] * radix[d + 1]
    codes = sumset_codes((pa - lo) @ weights, (pb - lo) @ weights, universe)
    out = np.empty((len(codes), k), dtype=np.int64)
    rest = codes
    for d in range(k - 1, -1, -1):
        out[:, d] = rest % radix[d]
        rest = rest // radix[d]
    return out + 2 * lo


def _convolve_bigint(a: SparseBoolFn, b: SparseBoolFn, L: int):
    ea = {encode_base_q(p, L) for p in a.support}
    eb = {encode_base_q(p, L) for p in b.support}
    sums = {x + y for x in ea for y in eb}
    return {decode_base_q(s, L, a.dim, 2 * L) for s in sums}


def convolve_encoded(a: SparseBoolFn, b: SparseBoolFn) -> SparseBoolFn:
    _check(a, b)
    k = a.dim
    if not a.support or not b.support:
        return SparseBoolFn(k, frozenset(), 0)
    if k == 0:
        return SparseBoolFn(0, frozenset({()}), 0)
    pa = np.array(sorted(a.support), dtype=np.int64).reshape(-1, k)
    pb = np.array(sorted(b.support), dtype=np.int64).reshape(-1, k)
    out = convolve_points(pa, pb)
    return SparseBoolFn.from_points(k, (tuple(int(v) for v in row) for row in out))
