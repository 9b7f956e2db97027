"""Randomized misreport trials against the mechanism.

Each trial picks a user, fabricates a plausible lie (value scaling,
option dropping, demand shrinking or growing), and compares the user's
utility under the lie with her utility under truthful reporting, both
measured with her true valuation.  All randomness flows from the seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from multiprocessing import Pool
from typing import Optional

from .errors import InvalidParams
from .limits import DEFAULT_LIMITS, Limits
from .model import Instance, MultiMindedBid, as_multi, cx, frac
from .mechanism import (RangeDescriptor, build_range, mechanism_outcome,
                        misreport_trial)

_VALUE_DENOMS = (1, 2, 4, 5)


def random_fake(rt: random.Random, bid, C: Fraction,
                P: Fraction) -> MultiMindedBid:
    """A legal fabricated bid derived from a true one."""
    mbid = as_multi(bid)
    for _ in range(16):
        kind = rt.choice(("scale_values", "inflate_one", "drop_option",
                          "shrink_demands", "grow_demands", "replace_values"))
        opts = list(mbid.nonzero_options())
        try:
            if kind == "scale_values":
                f = Fraction(rt.randint(0, 12), 4)
                fake = MultiMindedBid([(d, v * f) for d, v in opts])
            elif kind == "inflate_one" and opts:
                j = rt.randrange(len(opts))
                fake = MultiMindedBid(
                    [(d, v * rt.randint(2, 10) if i == j else v)
                     for i, (d, v) in enumerate(opts)])
            elif kind == "drop_option" and opts:
                j = rt.randrange(len(opts))
                fake = MultiMindedBid(
                    [o for i, o in enumerate(opts) if i != j])
            elif kind == "shrink_demands":
                fake = MultiMindedBid(
                    [(cx(d.re / 2, d.im / 2), v) for d, v in opts])
            elif kind == "grow_demands":
                f = Fraction(rt.randint(5, 8), 4)
                fake = MultiMindedBid(
                    [(cx(d.re * f, d.im * f), v) for d, v in opts])
            else:
                fake = MultiMindedBid(
                    [(d, Fraction(rt.randint(1, 50),
                                  rt.choice(_VALUE_DENOMS)))
                     for d, v in opts])
            Instance(C, [fake], P)  # legality check
            return fake
        except InvalidParams:
            continue
    return mbid  # all perturbations were illegal; fall back to the truth


def _one_trial(args):
    bids, liar, fake, rng_desc, truth = args
    u_truth, u_lie = misreport_trial(bids, liar, fake, rng_desc,
                                     truth_outcome=truth)
    return u_truth, u_lie


def run_audit(inst: Instance, eps, trials: int, seed: int, jobs: int = 1,
              limits: Limits = DEFAULT_LIMITS,
              rng_desc: Optional[RangeDescriptor] = None) -> dict:
    """Run misreport trials and summarize the utility gaps.

    The report's worst_gap is max(utility_lie - utility_truth) over all
    trials; a truthful mechanism keeps it at or below zero.
    """
    eps = frac(eps)
    if trials < 0:
        raise InvalidParams("trials must be nonnegative")
    if rng_desc is None:
        rng_desc = build_range(inst.capacity, inst.n, eps,
                               inst.power_factor_bound, limits)
    report = {
        "trials": trials,
        "violations": 0,
        "worst_gap": None,
        "range_hash": rng_desc.range_hash,
    }
    if trials == 0:
        return report

    bids = list(inst.bids)
    truth = mechanism_outcome(bids, rng_desc, limits)
    specs = []
    for t in range(trials):
        rt = random.Random(seed * 1_000_003 + t)
        liar = rt.randrange(inst.n)
        fake = random_fake(rt, bids[liar], inst.capacity,
                           inst.power_factor_bound)
        specs.append((bids, liar, fake, rng_desc, truth))

    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.map(_one_trial, specs)
    else:
        results = [_one_trial(s) for s in specs]

    worst = None
    violations = 0
    for u_truth, u_lie in results:
        gap = u_lie - u_truth
        if worst is None or gap > worst:
            worst = gap
        if gap > 0:
            violations += 1
    report["violations"] = violations
    report["worst_gap"] = f"{worst.numerator}/{worst.denominator}"
    return report
