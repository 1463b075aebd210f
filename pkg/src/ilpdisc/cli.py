"""Command-line front end: ``solve``, ``generate`` and ``bench``."""

import argparse
import csv
import json
import random
import sys
import time
from fractions import Fraction

from . import dp, oracle
from .errors import BudgetExceeded, EscalationMismatch, RankDeficient
from .instance import (FEASIBLE, OPTIMAL, delta_family_instance,
                       dump_instance, instance_from_dict, random_instance)

EXIT_MALFORMED = 1
EXIT_RANK = 2
EXIT_ORACLE = 3
EXIT_ESCALATION = 4

BENCH_HEADER = ["k", "delta", "eta", "rho", "max_level", "opt_ms", "feas_ms"]


def _eta_arg(text):
    if text in ("safe", "aggressive"):
        return text
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("eta must be safe, aggressive or a positive integer")
    if v < 1:
        raise argparse.ArgumentTypeError("eta must be >= 1")
    return v


def _int_range(text):
    """``"2..3"`` -> [2, 3]; ``"4,8,16"`` -> [4, 8, 16]; ``"5"`` -> [5]."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _delta_values(text, points):
    """Explicit list, or ``lo..hi`` spread geometrically over ``points`` values."""
    if ".." not in text:
        return _int_range(text)
    lo, hi = (int(v) for v in text.split("..", 1))
    if points <= 1 or lo == hi:
        return [lo]
    vals = []
    for i in range(points):
        v = round(lo * (hi / lo) ** (i / (points - 1)))
        if v not in vals:
            vals.append(v)
    return vals


def _fail(code, msg):
    print(f"error: {msg}", file=sys.stderr)
    return code


def result_dict(inst, res, with_stats):
    st = res.stats
    stats = {
        "eta": st.get("eta"),
        "rho": st.get("rho"),
        "delta": str(Fraction(st.get("delta", 0))),
        "level_sizes": st.get("level_sizes", []),
        "wall_ms": round(st.get("wall_ms", 0.0), 3),
        "shift_y": st.get("shift_y", []),
    }
    if with_stats:
        stats["level_states"] = st.get("level_states", [])
        stats["dp_ms"] = round(st.get("dp_ms", 0.0), 3)
        stats["chi"] = st.get("chi")
        stats["delta_bound"] = str(Fraction(st.get("delta_bound", 0)))
    return {"status": res.status, "objective": res.objective, "x": res.x, "stats": stats}


def cmd_solve(args):
    try:
        with open(args.path, encoding="utf-8") as fh:
            data = json.load(fh)
        inst = instance_from_dict(data)
    except RankDeficient as exc:
        return _fail(EXIT_RANK, f"rank-deficient constraint matrix: {exc}")
    except (OSError, ValueError) as exc:
        return _fail(EXIT_MALFORMED, f"malformed instance: {exc}")

    escalate = args.escalate if args.escalate is not None else args.eta == "aggressive"
    cfg = dp.DpConfig(mode=args.mode, eta_policy=args.eta,
                      rho_policy=args.rho if args.rho is not None else "proximity",
                      escalate=escalate, prune=args.prune)
    try:
        res = dp.solve(inst, cfg)
    except EscalationMismatch as exc:
        return _fail(EXIT_ESCALATION, f"escalation mismatch: {exc}")

    if res.x is not None and not inst.is_solution(res.x):
        raise AssertionError("solver returned a vector that does not satisfy A x = b")

    if args.oracle_check:
        try:
            ref = oracle.ilp_brute(inst, oracle.OracleBudget(max_l1=args.oracle_l1))
        except BudgetExceeded as exc:
            return _fail(EXIT_ORACLE, f"oracle budget exceeded: {exc}")
        if args.mode == dp.OPTIMIZE:
            agree = (res.status, res.objective) == (ref.status, ref.objective)
        else:
            agree = (res.status == FEASIBLE) == (ref.status == OPTIMAL)
        if not agree:
            return _fail(EXIT_ORACLE, f"oracle mismatch: solver {res.status}/{res.objective}, "
                                      f"brute force {ref.status}/{ref.objective}")

    json.dump(result_dict(inst, res, args.stats), sys.stdout)
    sys.stdout.write("\n")
    return 0


def cmd_generate(args):
    rng = random.Random(args.seed)
    inst = random_instance(args.k, args.n, args.max_entry, rng, feasible=args.feasible,
                           positive_row=args.positive_row)
    sys.stdout.write(dump_instance(inst) + "\n")
    return 0


def _warm_up():
    # compile the numeric kernels so the first timed row is not charged for it
    inst = delta_family_instance(2, 2, random.Random(0))
    dp.solve(inst, dp.DpConfig(rho_policy=2))
    dp.solve(inst, dp.DpConfig(mode=dp.FEASIBILITY, rho_policy=2))


def bench_rows(ks, deltas, repetitions, seed=0, eta="safe", prune=True):
    """One row per (k, delta, repetition) on the delta family.

    The family has nonnegative rows, so sign pruning discards most states;
    pass ``prune=False`` to time the full windowed state space.
    """
    _warm_up()
    rows = []
    for k in ks:
        for delta in deltas:
            for rep in range(repetitions):
                rng = random.Random(f"{seed}:{k}:{delta}:{rep}")
                inst = delta_family_instance(k, delta, rng)
                t0 = time.perf_counter()
                res = dp.solve(inst, dp.DpConfig(eta_policy=eta, prune=prune))
                t1 = time.perf_counter()
                dp.solve(inst, dp.DpConfig(mode=dp.FEASIBILITY, eta_policy=eta, prune=prune))
                t2 = time.perf_counter()
                st = res.stats
                rows.append([k, delta, st["eta"], st["rho"], max(st["level_sizes"] or [0]),
                             round(1000 * (t1 - t0), 3), round(1000 * (t2 - t1), 3)])
    return rows


def cmd_bench(args):
    ks = _int_range(args.k_range)
    deltas = _delta_values(args.delta_range, args.delta_points)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(BENCH_HEADER)
    for row in bench_rows(ks, deltas, args.repetitions, args.seed, args.eta, args.prune):
        out.writerow(row)
        sys.stdout.flush()
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ilpdisc", description="Exact ILP in standard form by a "
                                "discrepancy-window dynamic program.")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count (results never depend on it; the solver is single-threaded)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file and print a JSON result")
    s.add_argument("path")
    s.add_argument("--mode", choices=[dp.OPTIMIZE, dp.FEASIBILITY], default=dp.OPTIMIZE)
    s.add_argument("--eta", type=_eta_arg, default="safe")
    s.add_argument("--rho", type=int, default=None)
    s.add_argument("--escalate", dest="escalate", action="store_true", default=None)
    s.add_argument("--no-escalate", dest="escalate", action="store_false")
    s.add_argument("--oracle-check", action="store_true")
    s.add_argument("--oracle-l1", type=int, default=20,
                   help="l1 budget of the brute-force check")
    s.add_argument("--stats", action="store_true")
    s.add_argument("--no-prune", dest="prune", action="store_false",
                   help="keep states that sign-constant rows rule out")
    s.add_argument("--seed", type=int, default=0, help="unused by solve; accepted for symmetry")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("generate", help="print a seeded random instance")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--max-entry", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--feasible", action="store_true")
    g.add_argument("--positive-row", action="store_true",
                   help="make the first row strictly positive (bounded feasible region)")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="print CSV timings over the delta family")
    b.add_argument("--k-range", default="2..3")
    b.add_argument("--delta-range", default="4..40")
    b.add_argument("--delta-points", type=int, default=5)
    b.add_argument("--repetitions", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--eta", type=_eta_arg, default="safe")
    b.add_argument("--no-prune", dest="prune", action="store_false",
                   help="keep every window state (timings then track the full windows)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "generate" and (args.k < 1 or args.n < args.k):
        return _fail(EXIT_MALFORMED, "need 1 <= k <= n")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
