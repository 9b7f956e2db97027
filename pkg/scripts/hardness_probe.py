#!/usr/bin/env python3
"""Probe how capacity relaxation erodes the subset-sum dichotomy.

The reduction instances answer the subset-sum question exactly as long as
B^2 cot^2(theta) (beta^2 - 1) stays below 1; once the relaxed oracle may
overshoot by more, infeasible questions start to look feasible.  This
script sweeps beta over a grid and reports, per spec, the predicted
threshold and the first beta at which the relaxed oracle's optimum jumps.

Usage: python scripts/hardness_probe.py [--target 12]
"""

import argparse
import pathlib
import sys
from fractions import Fraction as F

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ckpsolve import SubSumSpec, gen_subsum_reduction, subsum_beta_slack
from ckpsolve.oracle import brute_force_ckp


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--target", type=int, default=12)
    args = ap.parse_args()
    B = args.target
    # all-even elements, odd target: infeasible by parity
    elements = [2, 4, 6, 8]
    target = B if B % 2 == 1 else B + 1
    spec = SubSumSpec(elements, target, 1, F(1, 2))
    inst = gen_subsum_reduction(spec)
    print(f"elements={elements} target={target} (infeasible by parity)")
    print(f"{'beta':>8} {'slack B^2cot^2(b^2-1)':>24} {'opt':>10}")
    for num in range(0, 13):
        beta = 1 + F(num, 10 * target * target)
        slack = subsum_beta_slack(spec, beta)
        opt = brute_force_ckp(inst, beta=beta).opt_value
        marker = "dichotomy intact" if slack < 1 else "relaxation too loose"
        print(f"{str(beta):>8} {str(slack):>24} {str(opt):>10}  {marker}")


if __name__ == "__main__":
    main()
