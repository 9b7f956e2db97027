#!/usr/bin/env python3
"""Timing sweep for the bi-criteria solvers and the mechanism.

Writes one CSV row per (solver, n, eps) cell with median wall time and the
instrumentation counters, plus the exact optimality gap against the
brute-force oracle where the oracle is tractable.

Usage: python scripts/run_benchmarks.py [--out bench.csv] [--trials 3]
"""

import argparse
import csv
import pathlib
import statistics
import sys
import time
from fractions import Fraction as F

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ckpsolve import (build_range, ckp_bifptas, gen_random,
                      mechanism_outcome, multickp_fptas)
from ckpsolve.mechanism import _guess_arrays
from ckpsolve.oracle import brute_force_ckp, brute_force_multi


def bench_solver(writer, trials):
    for n in (4, 6, 8, 10, 12):
        for eps in (F(1, 2), F(1, 4), F(1, 8)):
            for kind in ("single", "multi"):
                opts = 1 if kind == "single" else 3
                times, ratios = [], []
                for t in range(trials):
                    inst = gen_random(n, opts, F(1, 3), seed=100 * n + t,
                                      power_factor=2)
                    solver = ckp_bifptas if kind == "single" \
                        else multickp_fptas
                    t0 = time.perf_counter()
                    res = solver(inst, eps)
                    times.append(time.perf_counter() - t0)
                    oracle_ok = n <= 10 if kind == "single" else n <= 8
                    if oracle_ok:
                        oracle = (brute_force_ckp if kind == "single"
                                  else brute_force_multi)(inst)
                        if oracle.opt_value > 0:
                            ratios.append(
                                float(res.allocation.total_value
                                      / oracle.opt_value))
                writer.writerow({
                    "solver": f"{kind}-fptas",
                    "n": n,
                    "eps": str(eps),
                    "median_time_s": round(statistics.median(times), 5),
                    "min_value_ratio":
                        round(min(ratios), 4) if ratios else "",
                    "guesses": res.stats.guesses_tried,
                    "dp_cells": res.stats.dp_cells,
                })


def bench_mechanism(writer, trials):
    for n in (2, 3, 4):
        for eps in (F(1, 2), F(1, 4)):
            times = []
            rng_desc = build_range(F(1), n, eps, F(1))
            for t in range(trials):
                inst = gen_random(n, 2, F(1, 3), seed=500 * n + t,
                                  power_factor=1)
                t0 = time.perf_counter()
                mechanism_outcome(list(inst.bids), rng_desc)
                times.append(time.perf_counter() - t0)
            writer.writerow({
                "solver": "mechanism",
                "n": n,
                "eps": str(eps),
                "median_time_s": round(statistics.median(times), 5),
                "min_value_ratio": "",
                "guesses": len(_guess_arrays(rng_desc)),
                "dp_cells": "",
            })


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="bench.csv")
    ap.add_argument("--trials", type=int, default=3)
    args = ap.parse_args()
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "solver", "n", "eps", "median_time_s", "min_value_ratio",
            "guesses", "dp_cells"])
        writer.writeheader()
        bench_solver(writer, args.trials)
        bench_mechanism(writer, args.trials)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
