"""Brute-force reference answers.

Nothing in here imports the solver; these routines are the ground truth the
solver is checked against, so they stay deliberately naive.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb, lcm

import numpy as np

from .errors import BudgetExceeded
from .instance import INFEASIBLE, OPTIMAL, IlpInstance, SolveResult

MAX_POINTS = 5_000_000


@dataclass(frozen=True)
class OracleBudget:
    max_l1: int = 20
    max_subsets: int = 1 << 12

    def __post_init__(self):
        if self.max_l1 < 0 or self.max_subsets <= 0:
            raise ValueError("budget must be positive")


def compositions(total: int, parts: int):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for bar in bars:
            out.append(bar - prev - 1)
            prev = bar
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def _sign_row(A):
    """Index of a row whose entries are all positive or all negative, else None."""
    for i, row in enumerate(A):
        if all(a > 0 for a in row) or all(a < 0 for a in row):
            return i
    return None


def _brute_bounded_row(inst: IlpInstance, r: int) -> SolveResult:
    """Complete enumeration of ``{x >= 0 : A[r] x = b[r]}`` when ``A[r]`` has one sign.

    Partial vectors are grown column by column and dropped as soon as row ``r``
    overshoots; the survivors are then checked against every row.
    """
    sgn = 1 if inst.A[r][0] > 0 else -1
    a = [sgn * v for v in inst.A[r]]
    target = sgn * inst.b[r]
    if target < 0:
        return SolveResult(INFEASIBLE)
    X = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1, dtype=np.int64)
    for j, aj in enumerate(a):
        reps = (target - used) // aj + 1
        if int(reps.sum()) > MAX_POINTS:
            raise BudgetExceeded(f"more than {MAX_POINTS} partial vectors")
        rows = np.repeat(np.arange(len(X)), reps)
        starts = np.cumsum(reps) - reps
        xj = np.arange(len(rows)) - np.repeat(starts, reps)
        X = np.column_stack([X[rows], xj])
        used = used[rows] + aj * xj
    X = X[used == target]
    A = np.array(inst.A, dtype=np.int64)
    X = X[np.all(X @ A.T == np.array(inst.b, dtype=np.int64), axis=1)]
    if len(X) == 0:
        return SolveResult(INFEASIBLE)
    vals = X @ np.array(inst.c, dtype=np.int64)
    i = int(np.argmax(vals))
    return SolveResult(OPTIMAL, int(vals[i]), [int(v) for v in X[i]])


def ilp_brute(inst: IlpInstance, budget: OracleBudget = OracleBudget()) -> SolveResult:
    """Exhaustive search for ``max c x, A x = b, x >= 0``.

    If some row of ``A`` is strictly one-signed the feasible set is finite and
    is enumerated completely (the l1 budget is then irrelevant).  Otherwise all
    ``x >= 0`` with ``||x||_1 <= budget.max_l1`` are tried.

    Ties in the objective are broken towards the first vector found.
    """
    n = inst.n
    r = _sign_row(inst.A)
    if r is not None:
        return _brute_bounded_row(inst, r)
    if comb(budget.max_l1 + n, n) > MAX_POINTS:
        raise BudgetExceeded(f"{comb(budget.max_l1 + n, n)} candidate vectors")
    A = np.array(inst.A, dtype=np.int64)
    b = np.array(inst.b, dtype=np.int64)
    c = np.array(inst.c, dtype=np.int64)
    best_val, best_x = None, None
    for m in range(budget.max_l1 + 1):
        X = np.array(list(compositions(m, n)), dtype=np.int64).reshape(-1, n)
        ok = np.all(X @ A.T == b, axis=1)
        if not ok.any():
            continue
        vals = X[ok] @ c
        i = int(np.argmax(vals))
        if best_val is None or vals[i] > best_val:
            best_val, best_x = int(vals[i]), [int(v) for v in X[ok][i]]
    if best_x is None:
        return SolveResult(INFEASIBLE)
    return SolveResult(OPTIMAL, best_val, best_x)


def _integer_columns(M):
    d = 1
    for row in M:
        for v in row:
            d = lcm(d, Fraction(v).denominator)
    k, n = len(M), len(M[0])
    cols = [tuple(int(Fraction(M[i][j]) * d) for i in range(k)) for j in range(n)]
    return cols, d


def _disc_int(cols) -> int:
    """min over signs of max |sum +-col|, on integer columns (first sign fixed)."""
    if not cols:
        return 0
    k = len(cols[0])
    best = None
    first, rest = cols[0], cols[1:]
    for signs in product((1, -1), repeat=len(rest)):
        s = list(first)
        for sg, col in zip(signs, rest):
            if sg > 0:
                for i in range(k):
                    s[i] += col[i]
            else:
                for i in range(k):
                    s[i] -= col[i]
        v = max(abs(x) for x in s)
        if best is None or v < best:
            best = v
            if best == 0:
                break
    return best


def disc_brute(M) -> Fraction:
    n = len(M[0])
    if n > 20:
        raise BudgetExceeded("disc_brute supports at most 20 columns")
    cols, d = _integer_columns(M)
    return Fraction(_disc_int(cols), d)


def herdisc_brute(M, budget: OracleBudget = OracleBudget()) -> Fraction:
    n = len(M[0])
    if n > 12 or (1 << n) > budget.max_subsets:
        raise BudgetExceeded("herdisc_brute supports at most 12 columns")
    cols, d = _integer_columns(M)
    best = 0
    for r in range(1, n + 1):
        for sub in combinations(cols, r):
            best = max(best, _disc_int(list(sub)))
    return Fraction(best, d)


def delta_brute(A) -> int:
    """Largest absolute k x k minor (cofactor expansion, independent of exact-linalg)."""
    k, n = len(A), len(A[0])
    best = 0
    for cols in combinations(range(n), k):
        best = max(best, abs(cofactor_det([[A[i][j] for j in cols] for i in range(k)])))
    return best


def cofactor_det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total
