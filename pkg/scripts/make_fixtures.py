#!/usr/bin/env python3
"""Regenerate the bundled instance fixtures (deterministic)."""

import pathlib
import sys
from fractions import Fraction as F

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ckpsolve import (Instance, MultiMindedBid, SubSumSpec, cx, gen_random,
                      gen_subsum_reduction, write_instance)

OUT = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def main():
    OUT.mkdir(exist_ok=True)
    write_instance(gen_random(5, 1, F(1, 3), seed=11),
                   OUT / "single5.json")
    write_instance(gen_random(4, 3, F(1, 2), seed=29, power_factor=2),
                   OUT / "multi4.json")
    write_instance(gen_random(3, 2, 0, seed=7, power_factor=1),
                   OUT / "mech3.json")
    # two users fighting over the whole capacity
    duel = Instance(1, [MultiMindedBid([(cx(1, 0), F(5))]),
                        MultiMindedBid([(cx(1, 0), F(3))])], 1)
    write_instance(duel, OUT / "duel.json")
    write_instance(
        gen_subsum_reduction(SubSumSpec([1, 2, 3], 3, 1, F(1, 2))),
        OUT / "subsum_feasible.json")
    write_instance(
        gen_subsum_reduction(SubSumSpec([2, 4], 3, 1, F(1, 2))),
        OUT / "subsum_infeasible.json")
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
