"""Divide-and-conquer dynamic program over discrepancy windows.

Level ``i`` of the table holds, for every integer right-hand side ``b'`` in
the window ``B_{rho-i} = Z^k ∩ (b/2^j + 4*eta*B'[-1,1]^k)``, the best
objective of some ``x >= 0`` with ``A x = b'`` (or a feasibility bit).
Level 0 is seeded with ``0`` and the columns of ``A``; each further level
combines two states of the level below.

Tables are dense numpy grids over the bounding box of each window.  Window
membership is decided exactly: a float filter settles points far from the
boundary and rational arithmetic settles the rest.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from numba import njit

from . import boolconv, lattice, linalg, precond, simplex
from .errors import (EscalationMismatch, LpInfeasible, LpUnbounded,
                     RankDeficient)
from .instance import (FEASIBLE, INFEASIBLE, OPTIMAL, UNBOUNDED, IlpInstance,
                       SolveResult)
from .mvee import DEFAULT_EPS

OPTIMIZE = "optimize"
FEASIBILITY = "feasibility"

NEG = -(1 << 62)
_VALUE_LIMIT = 1 << 60
_FLOAT_SLACK = 1e-7

EtaPolicy = Union[str, int]


@dataclass
class DpConfig:
    mode: str = OPTIMIZE
    eta_policy: EtaPolicy = "safe"      # "safe", "aggressive" or an explicit int
    rho_policy: Union[str, int] = "proximity"
    escalate: bool = False
    stats: bool = True
    c_chi: int = 3
    c_rho: int = 6
    eps: Fraction = DEFAULT_EPS
    exact_delta_limit: int = 50_000     # max number of k-subsets for exact Delta
    keep_tables: bool = False
    prune: bool = True                  # drop states ruled out by sign-constant rows

    def __post_init__(self):
        if self.mode not in (OPTIMIZE, FEASIBILITY):
            raise ValueError(f"unknown mode {self.mode!r}")
        if isinstance(self.eta_policy, int) and self.eta_policy < 1:
            raise ValueError("explicit eta must be >= 1")
        if isinstance(self.rho_policy, int) and self.rho_policy < 1:
            raise ValueError("explicit rho must be >= 1")


# parameters ----------------------------------------------------------------

def choose_eta(pre: precond.LdPreconditioner, policy: EtaPolicy = "safe") -> int:
    """Upper bound on herdisc(M) used as the window half-width unit.

    ``safe`` is Beck-Fiala: unit l2 columns have l1 norm at most sqrt(k),
    so herdisc < 2 sqrt(k).
    """
    k = pre.k
    if isinstance(policy, int) and not isinstance(policy, bool):
        if policy < 1:
            raise ValueError("explicit eta must be >= 1")
        return policy
    if policy == "safe":
        r = math.isqrt(4 * k)
        return r if r * r == 4 * k else r + 1
    if policy == "aggressive":
        return max(1, math.ceil(2 * math.sqrt(math.log(k + 2))))
    raise ValueError(f"unknown eta policy {policy!r}")


@dataclass(frozen=True)
class RhoChoice:
    rho: int
    shift: Tuple[int, ...]
    shifted: IlpInstance
    chi: int
    lp_vertex: Tuple[Fraction, ...]


def _int_root_ceil(x: Fraction, k: int) -> int:
    """Smallest integer m >= 0 with m**k >= x."""
    if x <= 0:
        return 0
    m = max(1, int(float(x) ** (1.0 / k)))
    while m ** k < x:
        m += 1
    while m > 1 and (m - 1) ** k >= x:
        m -= 1
    return m


def proximity_chi(k: int, delta_bound, c_chi: int = 3) -> int:
    """``ceil(c_chi * k^2 * D * D^(1/k))`` computed exactly."""
    d = Fraction(delta_bound)
    base = c_chi * k * k * d
    # chi^k >= base^k * d  <=>  chi >= base * d^(1/k)
    return _int_root_ceil(base ** k * d, k)


def rho_for(k: int, chi: int, c_rho: int = 6) -> int:
    target = c_rho * k * chi
    rho, power = 0, Fraction(1)
    while power < target:
        power *= Fraction(6, 5)
        rho += 1
    return max(rho, 1)


def choose_rho(inst: IlpInstance, delta_bound, policy="proximity", c_chi: int = 3,
               c_rho: int = 6) -> RhoChoice:
    """Shift variables towards an optimal LP vertex and size the recursion depth.

    Raises ``LpInfeasible`` or ``LpUnbounded`` according to the relaxation.
    """
    A = [list(r) for r in inst.A]
    lp = simplex.solve_lp(A, list(inst.b), list(inst.c))
    if lp.status == simplex.INFEASIBLE:
        raise LpInfeasible("LP relaxation is infeasible")
    if lp.status == simplex.UNBOUNDED:
        raise LpUnbounded("LP relaxation is unbounded")
    v = tuple(lp.x)
    k = inst.k
    chi = proximity_chi(k, delta_bound, c_chi)
    if isinstance(policy, int) and not isinstance(policy, bool):
        return RhoChoice(policy, (0,) * inst.n, inst, chi, v)
    if policy != "proximity":
        raise ValueError(f"unknown rho policy {policy!r}")
    y = tuple(max(0, ceil(vi) - chi) for vi in v)
    b_new = [bi - sum(a * yi for a, yi in zip(row, y)) for row, bi in zip(inst.A, inst.b)]
    return RhoChoice(rho_for(k, chi, c_rho), y, inst.with_rhs(b_new), chi, v)


# windows -------------------------------------------------------------------------

def build_window(j: int, pre: precond.LdPreconditioner, b, eta: int) -> List[Tuple[int, ...]]:
    """Integer points of the closed box ``b/2^j + 4 eta B'[-1,1]^k``, via the HNF form."""
    k = pre.k
    H = pre.H_enum
    center = [Fraction(bi, 2 ** j) for bi in b]
    uc = linalg.matvec(pre.U, center)
    offset = [uc[i] - 4 * eta * sum(H[i]) for i in range(k)]
    par = lattice.Parallelepiped.make([[8 * eta * h for h in row] for row in H], offset,
                                      lattice.CLOSED)
    pts = [tuple(int(v) for v in linalg.matvec(pre.U_inv, y))
           for y in lattice.enumerate_points(par)]
    return sorted(pts)


def in_window(x, j: int, pre: precond.LdPreconditioner, b, eta: int) -> bool:
    k = pre.k
    d = [Fraction(x[i]) - Fraction(b[i], 2 ** j) for i in range(k)]
    y = linalg.matvec(pre.B_inv, d)
    return all(abs(v) <= 4 * eta for v in y)


@dataclass
class Window:
    """The live part of ``B_j`` on its bounding box.

    Along the last coordinate the window meets every line in an interval, so
    it is stored as per-line bounds ``first``/``last`` (absolute, empty when
    ``first > last``); ``mask`` expands them on demand.  Live points are the
    window points that can still reach the root (all of them when pruning is
    off); ``size`` is ``|B_j|`` itself.
    """

    j: int
    lo: np.ndarray          # grid origin (int64, length k)
    shape: Tuple[int, ...]
    first: np.ndarray       # int64, shape[:-1]
    last: np.ndarray
    size: int

    @property
    def mask(self) -> np.ndarray:
        t = self.lo[-1] + np.arange(self.shape[-1])
        m = (t >= self.first[..., None]) & (t <= self.last[..., None])
        return m.reshape(self.shape)

    def contains(self, x) -> bool:
        idx = np.asarray(x, dtype=np.int64) - self.lo
        if np.any(idx < 0) or np.any(idx >= np.array(self.shape)):
            return False
        line = tuple(int(v) for v in idx[:-1])
        return bool(self.first[line] <= x[-1] <= self.last[line])

    def flat_index(self, x) -> Optional[int]:
        idx = np.asarray(x, dtype=np.int64) - self.lo
        if np.any(idx < 0) or np.any(idx >= np.array(self.shape)):
            return None
        return int(np.ravel_multi_index(tuple(idx), self.shape))

    def point(self, flat: int) -> np.ndarray:
        return self.lo + np.array(np.unravel_index(flat, self.shape), dtype=np.int64)

    def points(self) -> List[Tuple[int, ...]]:
        flat = np.flatnonzero(self.mask)
        pts = np.stack(np.unravel_index(flat, self.shape), axis=1) + self.lo
        return [tuple(int(v) for v in p) for p in pts]


class _WindowMaker:
    """Builds windows line by line along the last coordinate.

    On each line the window is an interval; its float endpoints are snapped
    to integers and every endpoint within ``_FLOAT_SLACK`` of the boundary
    is settled with exact integer arithmetic.
    """

    def __init__(self, pre: precond.LdPreconditioner, b, eta: int):
        self.b = [int(v) for v in b]
        self.eta = eta
        self.k = pre.k
        self.radius = [4 * eta * sum(abs(v) for v in row) for row in pre.B_prime]
        self.binv_f = np.array([[float(v) for v in row] for row in pre.B_inv])
        # integer form of B_inv: B_inv = binv_num / den
        self.den = linalg.common_denominator(pre.B_inv)
        self.binv_num = np.array([[int(v * self.den) for v in row] for row in pre.B_inv],
                                 dtype=object)

    def _exact(self, pts: np.ndarray, j: int, rows=None) -> np.ndarray:
        """Exact membership of integer points (optionally checking only some rows)."""
        if len(pts) == 0:
            return np.zeros(0, dtype=bool)
        d = pts.astype(object) * (2 ** j) - np.array(self.b, dtype=object)
        num = d.dot(self.binv_num.T if rows is None else self.binv_num[rows].T)
        bound = 4 * self.eta * self.den * 2 ** j
        return np.array([all(abs(v) <= bound for v in row) for row in num.reshape(len(pts), -1)],
                        dtype=bool)

    def make(self, j: int, lower=None, upper=None) -> Window:
        """Window ``B_j``; ``lower``/``upper`` optionally clip the live region per coordinate."""
        k = self.k
        lim = 4 * self.eta
        tol = _FLOAT_SLACK
        center = [Fraction(bi, 2 ** j) for bi in self.b]
        lo = np.array([ceil(center[i] - self.radius[i]) for i in range(k)], dtype=np.int64)
        hi = np.array([floor(center[i] + self.radius[i]) for i in range(k)], dtype=np.int64)
        cf = np.array([float(c) for c in center])
        pshape = tuple(int(v) for v in hi[:-1] - lo[:-1] + 1)
        if k == 1:
            P = np.zeros((1, 0), dtype=np.int64)
        else:
            P = np.indices(pshape).reshape(k - 1, -1).T.astype(np.int64) + lo[:-1]
        part = (P - cf[:-1]) @ self.binv_f[:, :-1].T      # row values without the last coordinate
        lf = np.full(len(P), -np.inf)
        uf = np.full(len(P), np.inf)
        ok = np.ones(len(P), dtype=bool)
        flat_rows = []
        for i in range(k):
            sl = self.binv_f[i, -1]
            if self.binv_num[i, -1] == 0:
                ok &= np.abs(part[:, i]) <= lim + tol
                flat_rows.append(i)
                continue
            e1 = cf[-1] + (-lim - part[:, i]) / sl
            e2 = cf[-1] + (lim - part[:, i]) / sl
            lf = np.maximum(lf, np.minimum(e1, e2))
            uf = np.minimum(uf, np.maximum(e1, e2))
        L = np.maximum(np.ceil(lf - tol), lo[-1]).astype(np.int64)
        U = np.minimum(np.floor(uf + tol), hi[-1]).astype(np.int64)
        ok &= L <= U
        for i in flat_rows:
            amb = np.flatnonzero(ok & (np.abs(part[:, i]) > lim - tol))
            pts = np.concatenate([P[amb], L[amb, None]], axis=1)
            ok[amb] = self._exact(pts, j, [i])
        amb = np.flatnonzero(ok & (L < lf + tol))
        bad = ~self._exact(np.concatenate([P[amb], L[amb, None]], axis=1), j)
        L[amb[bad]] += 1
        amb = np.flatnonzero(ok & (U > uf - tol))
        bad = ~self._exact(np.concatenate([P[amb], U[amb, None]], axis=1), j)
        U[amb[bad]] -= 1
        ok &= L <= U
        size = int((U - L + 1)[ok].sum())

        # live region: clip by the optional bounds, then crop to the bounding box
        if lower is not None:
            lo_l = np.asarray(lower, dtype=np.int64)
            ok &= np.all(P >= lo_l[:-1], axis=1)
            L = np.maximum(L, lo_l[-1])
        if upper is not None:
            hi_l = np.asarray(upper, dtype=np.int64)
            ok &= np.all(P <= hi_l[:-1], axis=1)
            U = np.minimum(U, hi_l[-1])
        ok &= L <= U
        if not ok.any():
            return Window(j, np.floor(cf).astype(np.int64), (1,) * k,
                          np.ones((1,) * (k - 1), dtype=np.int64),
                          np.zeros((1,) * (k - 1), dtype=np.int64), size)
        Pk, Lk, Uk = P[ok], L[ok], U[ok]
        tlo = np.concatenate([Pk.min(axis=0), [Lk.min()]]).astype(np.int64)
        thi = np.concatenate([Pk.max(axis=0), [Uk.max()]]).astype(np.int64)
        shape = tuple(int(v) for v in thi - tlo + 1)
        first = np.ones(shape[:-1], dtype=np.int64)
        last = np.zeros(shape[:-1], dtype=np.int64)
        if k == 1:
            first[()], last[()] = Lk[0], Uk[0]
        else:
            idx = tuple((Pk - tlo[:-1]).T)
            first[idx], last[idx] = Lk, Uk
        return Window(j, tlo, shape, first, last, size)


# tables ------------------------------------------------------------------

@dataclass
class Level:
    """Finite entries of one table, stored sparsely by flat index into the window grid."""

    index: int              # i
    window: Window          # B_{rho-i}
    keys: np.ndarray        # sorted flat indices of the finite entries
    vals: np.ndarray        # their values (0 in feasibility mode)
    splits: np.ndarray      # level 0: column index or -1; else flat index of b'' (-1: unknown)
    reused: bool = False    # filled from the square of an identical earlier input

    @classmethod
    def from_dense(cls, index, window, val, split, reused=False) -> "Level":
        keys = np.flatnonzero(val.ravel() > NEG)
        return cls(index, window, keys, val.ravel()[keys], split.ravel()[keys].copy(), reused)

    @property
    def states(self) -> int:
        return len(self.keys)

    def find(self, flat) -> int:
        """Position of ``flat`` among the keys, or -1."""
        if flat is None:
            return -1
        pos = int(np.searchsorted(self.keys, flat))
        return pos if pos < len(self.keys) and self.keys[pos] == flat else -1

    def value(self, flat) -> Optional[int]:
        pos = self.find(flat)
        return None if pos < 0 else int(self.vals[pos])

    def points(self) -> np.ndarray:
        return np.stack(np.unravel_index(self.keys, self.window.shape), axis=1) + self.window.lo


def _init_level(inst: IlpInstance, window: Window, mode: str) -> Level:
    val = np.full(window.shape, NEG, dtype=np.int64)
    split = np.full(window.shape, -1, dtype=np.int64)
    z = window.flat_index([0] * inst.k)
    if window.contains([0] * inst.k):
        val.flat[z] = 0
    for j in range(inst.n):
        col = [row[j] for row in inst.A]
        f = window.flat_index(col)
        if not window.contains(col):
            continue
        cj = inst.c[j] if mode == OPTIMIZE else 0
        if val.flat[f] == NEG or cj > val.flat[f]:
            val.flat[f] = cj
            split.flat[f] = j
    return Level.from_dense(0, window, val, split)


@njit(cache=True)
def _slab_index(coords, shape):
    """Ranges of a lexicographically sorted point list sharing all but the last coordinate."""
    F, k = coords.shape
    nslab = 1
    for d in range(k - 1):
        nslab *= shape[d]
    start = np.zeros(nslab, dtype=np.int64)
    end = np.zeros(nslab, dtype=np.int64)
    for a in range(F):
        key = 0
        for d in range(k - 1):
            key = key * shape[d] + coords[a, d]
        if end[key] == 0:
            start[key] = a
        end[key] = a + 1
    return start, end


@njit(cache=True)
def _maxplus_pairs(ca, va, fa, cb, vb, fb, same, shape, offset, val, split):
    """Max-plus combine every ``a`` of the first list with every ``b`` of the second.

    Points are grid coordinates in one common grid of ``shape``; the target of
    ``(a, b)`` is ``a + b + offset``.  Both lists are in ascending flat order.
    ``split`` keeps the smaller flat index of the two summands and ties go to
    the smallest such index, so the choice does not depend on visiting order.
    With ``same`` the lists coincide and only pairs ``a <= b`` are visited.
    Partners are looked up slab by slab, so only pairs whose sum lands in the
    grid are touched.
    """
    Fa, k = ca.shape
    Fb = cb.shape[0]
    strides = np.empty(k, dtype=np.int64)
    s = 1
    for d in range(k - 1, -1, -1):
        strides[d] = s
        s *= shape[d]
    slab_start, slab_end = _slab_index(cb, shape)
    last = np.empty(Fb, dtype=np.int64)
    for b in range(Fb):
        last[b] = cb[b, k - 1]
    lo = np.empty(k, dtype=np.int64)
    hi = np.empty(k, dtype=np.int64)
    cur = np.empty(k, dtype=np.int64)
    for a in range(Fa):
        empty = False
        for d in range(k):
            lo[d] = max(0, -offset[d] - ca[a, d])
            hi[d] = min(shape[d] - 1, shape[d] - 1 - offset[d] - ca[a, d])
            if lo[d] > hi[d]:
                empty = True
        if empty:
            continue
        for d in range(k - 1):
            cur[d] = lo[d]
        while True:
            key = 0
            base = 0
            for d in range(k - 1):
                key = key * shape[d] + cur[d]
                base += (ca[a, d] + cur[d] + offset[d]) * strides[d]
            s0 = slab_start[key]
            s1 = slab_end[key]
            if same:
                s0 = max(s0, a)
            if s1 > s0:
                i0 = s0 + np.searchsorted(last[s0:s1], lo[k - 1])
                i1 = s0 + np.searchsorted(last[s0:s1], hi[k - 1], side="right")
                off = base + (ca[a, k - 1] + offset[k - 1]) * strides[k - 1]
                for b in range(i0, i1):
                    t = off + last[b] * strides[k - 1]
                    cand = va[a] + vb[b]
                    first = min(fa[a], fb[b])
                    if cand > val[t] or (cand == val[t] and first < split[t]):
                        val[t] = cand
                        split[t] = first
            d = k - 2
            while d >= 0:
                cur[d] += 1
                if cur[d] <= hi[d]:
                    break
                cur[d] = lo[d]
                d -= 1
            if d < 0:
                break


class _Grid:
    """A fixed box containing every window of a run; squares live on it."""

    def __init__(self, windows):
        los = np.array([w.lo for w in windows])
        his = np.array([w.lo + np.array(w.shape) for w in windows])
        self.lo = los.min(axis=0)
        self.shape = tuple(int(v) for v in his.max(axis=0) - self.lo)

    def flats(self, level: Level):
        """Finite entries of ``level`` as grid coordinates, grid flat indices and values."""
        coords = (level.points() - self.lo).astype(np.int64).reshape(-1, len(self.shape))
        gflat = np.ravel_multi_index(tuple(coords.T), self.shape).astype(np.int64)
        return coords, gflat, level.vals


@dataclass
class _Square:
    """Self-combination of one input table, before any window is applied.

    Optimization squares cover the whole run grid (``val``/``split``, the
    latter a grid flat index); feasibility squares list every pairwise sum.
    """

    flats: np.ndarray
    vals: np.ndarray
    val: Optional[np.ndarray] = None
    split: Optional[np.ndarray] = None
    sums: Optional[np.ndarray] = None


def _dominates(flats, vals, sq: _Square) -> bool:
    """Every entry of the old input is present in the new one with a value at least as large."""
    if len(sq.flats) == 0:
        return True
    pos = np.searchsorted(flats, sq.flats)
    if np.any(pos >= len(flats)):
        return False
    return bool(np.all(flats[pos] == sq.flats) and np.all(vals[pos] >= sq.vals))


def _opt_square(grid: _Grid, coords, flats, vals, sq: Optional[_Square]) -> _Square:
    k = len(grid.shape)
    offset = grid.lo.astype(np.int64)
    shape = np.array(grid.shape, dtype=np.int64)
    if sq is not None and sq.val is not None and _dominates(flats, vals, sq):
        # only pairs touching a new or improved entry can change the square
        pos = np.searchsorted(flats, sq.flats)
        changed = np.ones(len(flats), dtype=bool)
        changed[pos[vals[pos] == sq.vals]] = False
        nd = int(changed.sum())
        if 2 * nd < len(flats):
            val, split = sq.val.copy(), sq.split.copy()
            if nd:
                _maxplus_pairs(coords[changed], vals[changed], flats[changed],
                               coords, vals, flats, False, shape, offset,
                               val.ravel(), split.ravel())
            return _Square(flats, vals, val=val, split=split)
    val = np.full(grid.shape, NEG, dtype=np.int64)
    split = np.full(grid.shape, -1, dtype=np.int64)
    if len(flats):
        _maxplus_pairs(coords, vals, flats, coords, vals, flats, True, shape, offset,
                       val.ravel(), split.ravel())
    return _Square(flats, vals, val=val, split=split)


def _opt_step(prev: Level, window: Window, index: int, sq: Optional[_Square], grid: _Grid):
    coords, flats, vals = grid.flats(prev)
    reused = (sq is not None and np.array_equal(sq.flats, flats)
              and np.array_equal(sq.vals, vals))
    if not reused:
        sq = _opt_square(grid, coords, flats, vals, sq)
    off = window.lo - grid.lo
    box = tuple(slice(int(o), int(o) + n) for o, n in zip(off, window.shape))
    new = sq.val[box]
    keys = np.flatnonzero((new > NEG) & window.mask)
    vals = new.ravel()[keys]
    gsplit = sq.split[box].ravel()[keys]
    splits = np.empty(0, dtype=np.int64)
    if len(keys):
        first = np.stack(np.unravel_index(gsplit, grid.shape), axis=1)
        first += grid.lo - prev.window.lo
        splits = np.ravel_multi_index(tuple(first.T), prev.window.shape).astype(np.int64)
    if np.any(np.abs(vals) >= _VALUE_LIMIT):
        raise OverflowError("DP values exceed the int64 safety range")
    return Level(index, window, keys, vals, splits, reused), sq


def _feas_step(prev: Level, window: Window, index: int, sq: Optional[_Square], grid: _Grid):
    k = len(window.shape)
    coords, flats, vals = grid.flats(prev)
    reused = sq is not None and np.array_equal(sq.flats, flats)
    if not reused:
        sums = np.empty((0, k), dtype=np.int64)
        if len(flats):
            pts = coords + grid.lo
            sums = boolconv.sumset_points(pts, pts)
        sq = _Square(flats, vals, sums=sums)
    idx = sq.sums - window.lo
    ok = np.all((idx >= 0) & (idx < np.array(window.shape)), axis=1)
    keys = np.empty(0, dtype=np.int64)
    if ok.any():
        keys = np.ravel_multi_index(tuple(idx[ok].T), window.shape).astype(np.int64)
        keys = np.unique(keys)
        pts = np.stack(np.unravel_index(keys, window.shape), axis=1)
        line = tuple(pts[:, :-1].T)
        t = pts[:, -1] + window.lo[-1]
        keys = keys[(t >= window.first[line]) & (t <= window.last[line])]
    return Level(index, window, keys, np.zeros(len(keys), dtype=np.int64),
                 np.full(len(keys), -1, dtype=np.int64), reused), sq


@dataclass
class DpRun:
    """Everything a finished DP pass knows; kept for witness recovery and audits."""

    inst: IlpInstance       # the (shifted) instance the DP ran on
    mode: str
    eta: int
    rho: int
    levels: List[Level]
    windows: Dict[int, Window]
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def root(self) -> Level:
        return self.levels[-1]

    def root_flat(self) -> Optional[int]:
        f = self.root.window.flat_index(self.inst.b)
        return None if self.root.find(f) < 0 else f

    def witness(self, i: int, flat: int) -> List[int]:
        """Some ``x >= 0`` with ``A x`` equal to the level-``i`` key ``flat``."""
        key = (i, flat)
        if key in self._memo:
            return self._memo[key]
        lvl = self.levels[i]
        n = self.inst.n
        if i == 0:
            x = [0] * n
            j = int(lvl.splits[lvl.find(flat)])
            if j >= 0:
                x[j] = 1
        else:
            below = self.levels[i - 1]
            s = self._split_of(i, flat)
            t = lvl.window.point(flat)
            partner = below.window.flat_index(t - below.window.point(s))
            x1 = self.witness(i - 1, s)
            x2 = self.witness(i - 1, partner)
            x = [u + v for u, v in zip(x1, x2)]
        self._memo[key] = x
        return x

    def _split_of(self, i: int, flat: int) -> int:
        lvl = self.levels[i]
        pos = lvl.find(flat)
        s = int(lvl.splits[pos])
        if s >= 0:
            return s
        # feasibility tables store no splits; recover the lexicographically first one
        below = self.levels[i - 1]
        bw = below.window
        t = lvl.window.point(flat)
        rest = t - below.points() - bw.lo
        ok = np.all((rest >= 0) & (rest < np.array(bw.shape)), axis=1)
        for c, r in zip(below.keys[ok], rest[ok]):
            if below.find(np.ravel_multi_index(tuple(r), bw.shape)) >= 0:
                lvl.splits[pos] = int(c)
                return int(c)
        raise AssertionError("feasible state without a split")

    def key_of(self, i: int, flat: int) -> np.ndarray:
        return self.levels[i].window.point(flat)


def live_bounds(inst: IlpInstance):
    """Per-coordinate bounds on states that some chain of additions can carry to ``b``.

    If row ``r`` of ``A`` is nonnegative, every partial sum ``A x'`` with
    ``0 <= x' <= x`` has ``r``-th entry at most ``b_r``; symmetrically for
    nonpositive rows.
    """
    big = 1 << 62
    lower, upper = [-big] * inst.k, [big] * inst.k
    for r, row in enumerate(inst.A):
        if all(v >= 0 for v in row):
            upper[r] = inst.b[r]
        elif all(v <= 0 for v in row):
            lower[r] = inst.b[r]
    return lower, upper


def run_dp(inst: IlpInstance, pre: precond.LdPreconditioner, eta: int, rho: int,
           mode: str = OPTIMIZE, prune: bool = True) -> DpRun:
    maker = _WindowMaker(pre, inst.b, eta)
    lower, upper = live_bounds(inst) if prune else (None, None)
    windows = {j: maker.make(j, lower, upper) for j in range(rho + 1)}
    grid = _Grid(list(windows.values()))
    levels = [_init_level(inst, windows[rho], mode)]
    step = _opt_step if mode == OPTIMIZE else _feas_step
    sq = None
    for i in range(1, rho + 1):
        lvl, sq = step(levels[-1], windows[rho - i], i, sq, grid)
        levels.append(lvl)
    return DpRun(inst, mode, eta, rho, levels, windows)


# driver ----------------------------------------------------------------------

def _delta_bound(inst: IlpInstance, pre: precond.LdPreconditioner, limit: int):
    if math.comb(inst.n, inst.k) <= limit:
        return Fraction(precond.delta_exact([list(r) for r in inst.A]))
    # a single-swap local optimum is a k!-approximation of the largest minor
    return pre.basis.det_abs * math.factorial(inst.k)


def _solve_once(inst: IlpInstance, choice: RhoChoice, pre, eta: int, mode: str,
                prune: bool = True):
    t0 = time.perf_counter()
    run = run_dp(choice.shifted, pre, eta, choice.rho, mode, prune)
    flat = run.root_flat()
    if flat is None:
        status, value, x = INFEASIBLE, None, None
    else:
        xs = run.witness(choice.rho, flat)
        x = [a + b for a, b in zip(xs, choice.shift)]
        if mode == OPTIMIZE:
            status = OPTIMAL
            value = run.root.value(flat) + inst.objective(choice.shift)
        else:
            status, value = FEASIBLE, None
        assert inst.is_solution(x), "witness does not solve the instance"
        if value is not None:
            assert inst.objective(x) == value, "witness objective mismatch"
    return status, value, x, run, time.perf_counter() - t0


def solve(inst: IlpInstance, cfg: Optional[DpConfig] = None) -> SolveResult:
    cfg = cfg or DpConfig()
    t_start = time.perf_counter()
    inst.validate()
    pre = precond.build([list(r) for r in inst.A], cfg.eps)
    eta = choose_eta(pre, cfg.eta_policy)
    dhat = _delta_bound(inst, pre, cfg.exact_delta_limit)
    stats = {"eta": eta, "delta": pre.delta, "delta_bound": dhat}

    mode = cfg.mode
    unbounded_lp = False
    try:
        choice = choose_rho(inst, dhat, cfg.rho_policy, cfg.c_chi, cfg.c_rho)
    except LpInfeasible:
        stats.update(rho=0, level_sizes=[], shift_y=[0] * inst.n,
                     wall_ms=1000 * (time.perf_counter() - t_start))
        return SolveResult(INFEASIBLE, stats=stats)
    except LpUnbounded:
        # any feasible integer point is within chi of a vertex of the feasible region
        unbounded_lp = True
        choice = choose_rho(IlpInstance(inst.A, inst.b, (0,) * inst.n), dhat,
                            cfg.rho_policy, cfg.c_chi, cfg.c_rho)
        mode = FEASIBILITY

    status, value, x, run, secs = _solve_once(inst, choice, pre, eta, mode, cfg.prune)
    if unbounded_lp:
        status = UNBOUNDED if status == FEASIBLE else INFEASIBLE
        value, x = None, None

    if cfg.escalate:
        status2, value2, _, _, _ = _solve_once(inst, choice, pre, 2 * eta, mode, cfg.prune)
        if unbounded_lp:
            status2 = UNBOUNDED if status2 == FEASIBLE else INFEASIBLE
            value2 = None
        if (status2, value2) != (status, value):
            raise EscalationMismatch(
                f"eta={eta}: {status}/{value}; eta={2 * eta}: {status2}/{value2}")

    rho = choice.rho
    stats.update(
        rho=rho,
        chi=choice.chi,
        shift_y=list(choice.shift),
        level_sizes=[run.windows[j].size for j in range(rho + 1)],
        level_states=[lvl.states for lvl in run.levels],
        dp_ms=1000 * secs,
        wall_ms=1000 * (time.perf_counter() - t_start),
    )
    if cfg.keep_tables:
        stats["run"] = run
    return SolveResult(status, value, x, stats)


def audit(run: DpRun) -> int:
    """Check that every finite entry backtracks to a valid witness; returns entries checked."""
    inst = run.inst
    A = np.array(inst.A, dtype=object)
    checked = 0
    for i, lvl in enumerate(run.levels):
        for pos, flat in enumerate(lvl.keys.tolist()):
            x = run.witness(i, flat)
            key = run.key_of(i, flat)
            assert all(v >= 0 for v in x)
            assert list(A.dot(np.array(x, dtype=object))) == [int(v) for v in key], (i, key, x)
            if run.mode == OPTIMIZE:
                assert inst.objective(x) == int(lvl.vals[pos])
            checked += 1
    return checked
