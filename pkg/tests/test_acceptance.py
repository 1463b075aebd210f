"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
when output capture is on).
"""

import math
import random
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from ilpdisc import boolconv as bc
from ilpdisc import cli, dp, lattice, linalg, mvee, oracle, precond
from ilpdisc.errors import EscalationMismatch
from ilpdisc.instance import FEASIBLE, OPTIMAL, delta_family_instance, random_instance
import mvee_check
from lattice_oracle import box_scan
from test_oracle import unit_column_matrix


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail
    return emit


def oracle_instances():
    """200 seeded instances: k cycles through 1, 2, 3; about 70% feasible by construction."""
    rng = random.Random(20240)
    out = []
    for t in range(200):
        k = (1, 2, 3)[t % 3]
        n = rng.randint(k, 7)
        max_entry = 4 if k < 3 else 2
        out.append(random_instance(k, n, max_entry, rng, feasible=rng.random() < 0.7,
                                   positive_row=True))
    return out


@pytest.fixture(scope="module")
def oracle_runs():
    runs = []
    t_dp = 0.0
    t0 = time.perf_counter()
    for inst in oracle_instances():
        s = time.perf_counter()
        opt = dp.solve(inst)
        feas = dp.solve(inst, dp.DpConfig(mode=dp.FEASIBILITY))
        t_dp += time.perf_counter() - s
        runs.append((inst, opt, feas, oracle.ilp_brute(inst)))
    return runs, t_dp, time.perf_counter() - t0


def test_oracle_equivalence(oracle_runs, report):
    runs, t_dp, total = oracle_runs
    bad = [i for i, (inst, opt, _, ref) in enumerate(runs)
           if (opt.status, opt.objective) != (ref.status, ref.objective)
           or (opt.x is not None and not inst.is_solution(opt.x))]
    ks = sorted({inst.k for inst, *_ in runs})
    report("oracle equivalence", not bad and total < 120,
           f"{len(runs) - len(bad)}/{len(runs)} match exactly (k in {ks}), "
           f"{total:.1f}s total ({t_dp:.1f}s in the solver), limit 120s")


def test_feasibility_optimization_agreement(oracle_runs, report):
    runs, _, _ = oracle_runs
    bad = [i for i, (inst, opt, feas, ref) in enumerate(runs)
           if (feas.status == FEASIBLE) != (opt.status == OPTIMAL)
           or (feas.status == FEASIBLE) != (ref.status == OPTIMAL)
           or (feas.x is not None and not inst.is_solution(feas.x))]
    n_feas = sum(opt.status == OPTIMAL for _, opt, _, _ in runs)
    report("feasibility/optimization agreement", not bad,
           f"{len(runs) - len(bad)}/{len(runs)} agree ({n_feas} feasible)")


def test_witness_audit(report):
    rng = random.Random(77)
    entries, failures = 0, []
    for t in range(20):
        k = 1 + t % 2
        inst = random_instance(k, rng.randint(k, 4), 3, rng, feasible=True, positive_row=True)
        for mode in (dp.OPTIMIZE, dp.FEASIBILITY):
            res = dp.solve(inst, dp.DpConfig(mode=mode, keep_tables=True))
            try:
                entries += dp.audit(res.stats["run"])
            except AssertionError as exc:
                failures.append((t, mode, str(exc)))
    report("witness audit", not failures,
           f"20 instances x 2 modes, {entries} table entries backtracked, {len(failures)} failures")


def test_preconditioner_bound(report):
    rng = random.Random(404)
    checked, bad = 0, []
    while checked < 50:
        k = rng.randint(1, 4)
        n = rng.randint(k, 8)
        A = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(k)]
        if linalg.rank(A) < k:
            continue
        pre = precond.build(A)
        norms_ok = all(sum(pre.M[i][j] ** 2 for i in range(k)) <= 1 for j in range(n))
        diag_ok = all(pre.H_enum[i][i] >= 1 for i in range(k))
        bound = mvee.exp_upper(Fraction(k, 2) + 2 * pre.eps) * math.factorial(k) * precond.delta_exact(A)
        if not (norms_ok and diag_ok and pre.delta <= bound):
            bad.append(A)
        checked += 1
    report("preconditioner bound", not bad, f"{checked - len(bad)}/{checked} matrices satisfy "
           "unit columns, diag(H) >= 1 and delta <= e^(k/2+2eps) k! Delta(A)")


def test_mvee_certificate(report):
    # extra runs on random symmetric point sets, then every run recorded so far
    rng = random.Random(5)
    eps_values = [Fraction(1), Fraction(1, 4), Fraction(1, 20)]
    for t in range(30):
        k = rng.randint(1, 4)
        pts = mvee.PointSet(k, tuple(tuple(Fraction(rng.randint(-6, 6)) for _ in range(k))
                                     for _ in range(rng.randint(k, 9))))
        if linalg.rank(pts.matrix()) < k:
            continue
        mvee.solve_mvee(pts, eps_values[t % 3])
    runs = mvee_check.RUNS
    report("MVEE certificate", len(runs) > 0 and all(runs),
           f"{sum(runs)}/{len(runs)} runs exactly feasible with "
           "e^(-2eps) <= det(sum c a a^T) det(W) <= 1")


def test_enumeration_bounds(report):
    rng = random.Random(606)
    bad = []
    for t in range(100):
        n = rng.randint(1, 4)
        H = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            H[i][i] = Fraction(rng.randint(2, 12), rng.randint(1, 4))
            for j in range(i + 1, n):
                H[i][j] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        r = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
        pts = list(lattice.enumerate_points(lattice.Parallelepiped.make(H, r)))
        lo = math.prod(math.floor(H[i][i]) for i in range(n))
        hi = math.prod(math.ceil(H[i][i]) for i in range(n))
        if not (lo <= len(pts) <= hi and len(set(pts)) == len(pts) and set(pts) == box_scan(H, r)):
            bad.append(t)
    report("enumeration bounds", not bad,
           f"{100 - len(bad)}/100 parallelepipeds within [prod floor, prod ceil] and equal to the box scan")


def test_convolution_equivalence(report):
    rng = random.Random(707)
    bad = 0
    for _ in range(500):
        k, L = rng.randint(1, 4), rng.randint(0, 8)
        side = 2 * L + 1
        cap = min(200, side ** k)

        def supp():
            return bc.SparseBoolFn.from_points(
                k, [tuple(rng.randint(-L, L) for _ in range(k)) for _ in range(rng.randint(1, cap))])

        a, b = supp(), supp()
        if bc.convolve_encoded(a, b).support != bc.convolve_naive(a, b).support:
            bad += 1
    carry_bad = 0
    pairs = 0
    for k in (1, 2, 3):
        for L in (1, 2, 3):
            q = 4 * L + 1
            box = list(product(range(-L, L + 1), repeat=k))
            codes = [bc.encode_base_q(x, L) for x in box]
            if len(set(codes)) != len(codes):
                carry_bad += 1
            for x, cx in zip(box, codes):
                for y, cy in zip(box, codes):
                    s = cx + cy
                    for i in range(k):
                        s, d = divmod(s, q)
                        carry_bad += d != x[i] + y[i] + 2 * L
                    carry_bad += s != 0
                    pairs += 1
    report("convolution equivalence", bad == 0 and carry_bad == 0,
           f"{500 - bad}/500 random pairs match the naive sumset; {pairs} encoded sums checked "
           f"for carries and injectivity, {carry_bad} violations")


def test_eta_safety(oracle_runs, report):
    rng = random.Random(808)
    over = 0
    worst = 0.0
    for t in range(50):
        k = rng.randint(1, 3)
        M = unit_column_matrix(rng, k, rng.randint(1, 8))
        h = oracle.herdisc_brute(M)
        worst = max(worst, float(h) / (2 * math.sqrt(k)))
        over += h * h > 4 * k
    runs, _, _ = oracle_runs
    esc_bad = 0
    for inst, _, _, ref in runs:
        try:
            r = dp.solve(inst, dp.DpConfig(eta_policy="aggressive", escalate=True))
            esc_bad += (r.status, r.objective) != (ref.status, ref.objective)
        except EscalationMismatch:
            esc_bad += 1
    report("eta safety", over == 0 and esc_bad == 0,
           f"herdisc <= 2 sqrt(k) on {50 - over}/50 unit-column matrices "
           f"(largest herdisc / 2 sqrt(k) = {worst:.3f}); aggressive eta with 2eta escalation "
           f"passed on {len(runs) - esc_bad}/{len(runs)} oracle instances")


@pytest.fixture(scope="module")
def scaling_rows():
    deltas = cli._delta_values("4..40", 7)
    return deltas, cli.bench_rows([2], deltas, 3, seed=0, prune=False)


def test_state_space_bound(scaling_rows, report):
    _, rows = scaling_rows
    # every bench configuration: the k = 2 sweep above plus a pruned k = 2..3 sweep
    extra = cli.bench_rows([2, 3], [4, 8, 16], 1, seed=1)
    bad = []
    for k, delta, eta, rho, max_level, _, _ in rows + extra:
        # A depends only on (k, delta); the seed only moves b and c
        inst = delta_family_instance(k, delta, random.Random(0))
        pre = precond.build([list(r) for r in inst.A])
        if max_level > (8 * eta + 3) ** k * pre.delta:
            bad.append((k, delta))
    total = len(rows) + len(extra)
    report("state-space bound", not bad,
           f"max_j |B_j| <= (8 eta + 3)^k delta on {total - len(bad)}/{total} benchmark runs")


def test_scaling_slope(scaling_rows, report):
    deltas, rows = scaling_rows
    x = np.log([r[1] for r in rows])
    y = np.log([r[5] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    report("scaling slope", 1.2 <= slope <= 2.8,
           f"k = 2, delta {deltas[0]}..{deltas[-1]} ({len(rows)} timed runs, full windows): "
           f"log-log slope of optimize time {slope:.2f}, accepted range [1.2, 2.8]")
