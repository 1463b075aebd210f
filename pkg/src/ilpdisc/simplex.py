"""Exact two-phase primal simplex (Bland's rule) for ``max c^T x, Ax = b, x >= 0``."""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: str
    x: Optional[List[Fraction]] = None
    objective: Optional[Fraction] = None
    basis: Optional[List[int]] = None


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows        # list of lists of Fraction
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, col):
        row = self.rows[r]
        piv = row[col]
        self.rows[r] = row = [v / piv for v in row]
        self.rhs[r] /= piv
        for i, other in enumerate(self.rows):
            if i != r and other[col] != 0:
                f = other[col]
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col

    def reduced_costs(self, cost):
        # reduced cost d_j = cost_j - sum_i cost_{basis_i} * row_i[j]
        n = len(cost)
        d = list(cost)
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb:
                row = self.rows[i]
                for j in range(n):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def run(self, cost, allowed):
        """Maximise ``cost`` over columns in ``allowed``; returns False if unbounded."""
        while True:
            d = self.reduced_costs(cost)
            entering = next((j for j in allowed if d[j] > 0 and j not in self.basis), None)
            if entering is None:
                return True
            best, leave = None, None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = self.rhs[i] / row[entering]
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return False
            self.pivot(leave, entering)


def solve_lp(A, b, c) -> LpResult:
    k, n = len(A), len(A[0])
    rows, rhs = [], []
    for i in range(k):
        sign = -1 if b[i] < 0 else 1
        rows.append([Fraction(sign * A[i][j]) for j in range(n)]
                    + [Fraction(int(t == i)) for t in range(k)])
        rhs.append(Fraction(sign * b[i]))
    tab = _Tableau(rows, rhs, [n + i for i in range(k)])

    phase1 = [Fraction(0)] * n + [Fraction(-1)] * k
    tab.run(phase1, range(n + k))
    if sum(tab.rhs[i] for i, bi in enumerate(tab.basis) if bi >= n) != 0:
        return LpResult(INFEASIBLE)
    # drive remaining (zero-level) artificials out of the basis
    for i, bi in enumerate(list(tab.basis)):
        if bi >= n:
            col = next((j for j in range(n) if tab.rows[i][j] != 0), None)
            if col is not None:
                tab.pivot(i, col)
    keep = [i for i, bi in enumerate(tab.basis) if bi < n]
    tab = _Tableau([tab.rows[i][:n] for i in keep], [tab.rhs[i] for i in keep],
                   [tab.basis[i] for i in keep])

    cost = [Fraction(v) for v in c]
    if not tab.run(cost, range(n)):
        return LpResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, bi in enumerate(tab.basis):
        x[bi] = tab.rhs[i]
    return LpResult(OPTIMAL, x, sum(ci * xi for ci, xi in zip(cost, x)), list(tab.basis))
