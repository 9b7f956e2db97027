"""Exponential-time exact solvers used as ground truth at desk scale.

Pure, deterministic, exact-rational.  Size caps are hard errors, never
silent truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Optional, Sequence

from .errors import InvalidParams, OracleCap
from .limits import DEFAULT_LIMITS, Limits
from .model import (Allocation, Instance, ZERO_DEMAND, build_allocation,
                    closure_value, frac)
from .rounding import GridPoint


@dataclass(frozen=True)
class OracleResult:
    opt_value: Fraction
    witness: Allocation
    nodes_explored: int


def _value_scale(values) -> int:
    s = 1
    for v in values:
        s = s * v.denominator // gcd(s, v.denominator)
    return s


def brute_force_ckp(inst: Instance, beta=Fraction(1),
                    limits: Limits = DEFAULT_LIMITS) -> OracleResult:
    """Exact optimum over all subsets of single-minded users, allowing the
    load bound to relax to beta * C."""
    beta = frac(beta)
    if beta < 1:
        raise InvalidParams("beta must be at least 1")
    if not inst.is_single_minded:
        raise InvalidParams("subset oracle requires single-minded bids")
    n = inst.n
    if n > limits.max_oracle_users:
        raise OracleCap(f"n={n} exceeds the oracle cap {limits.max_oracle_users}")
    # clear denominators once so the subset loop is pure integer arithmetic
    coords = [inst.bids[k].demand.re for k in range(n)]
    coords += [inst.bids[k].demand.im for k in range(n)]
    den = _value_scale(coords + [inst.capacity])
    re = [int(inst.bids[k].demand.re * den) for k in range(n)]
    im = [int(inst.bids[k].demand.im * den) for k in range(n)]
    rhs = (beta * inst.capacity * den) ** 2
    rhs_num, rhs_den = rhs.numerator, rhs.denominator
    values = [inst.bids[k].value for k in range(n)]

    best_value = Fraction(0)
    best_mask = 0
    for mask in range(1 << n):
        r = s = 0
        v = Fraction(0)
        m = mask
        k = 0
        while m:
            if m & 1:
                r += re[k]
                s += im[k]
                v += values[k]
            m >>= 1
            k += 1
        if (r * r + s * s) * rhs_den <= rhs_num and v > best_value:
            best_value = v
            best_mask = mask
    chosen = [inst.bids[k].demand if best_mask >> k & 1 else ZERO_DEMAND
              for k in range(n)]
    witness = build_allocation(inst.bids, chosen)
    return OracleResult(best_value, witness, 1 << n)


def brute_force_multi(inst: Instance, beta=Fraction(1),
                      limits: Limits = DEFAULT_LIMITS,
                      box: Optional[Sequence] = None) -> OracleResult:
    """Exact optimum over all option products, valued through the closure.

    With box=None the constraint is |total load| <= beta * C; with an
    explicit two-axis box the constraint is the componentwise bound
    total <= beta * box instead (assigned demands must be first-quadrant).
    """
    beta = frac(beta)
    if beta < 1:
        raise InvalidParams("beta must be at least 1")
    mbids = inst.multi_bids()
    count = 1
    for b in mbids:
        count *= len(b.options)
        if count > limits.max_oracle_products:
            raise OracleCap(
                f"option products exceed the cap {limits.max_oracle_products}")
    # closure of every option, computed once
    opt_values = [[closure_value(b, d) for d, _ in b.options] for b in mbids]
    if box is not None:
        box = tuple(frac(x) for x in box)
        if len(box) != 2:
            raise InvalidParams("box mode expects a two-axis capacity vector")
        rhs_re, rhs_im = beta * box[0], beta * box[1]
    else:
        rhs = (beta * inst.capacity) ** 2

    best_value = Fraction(0)
    best_pick = tuple(0 for _ in mbids)
    explored = 0
    for pick in product(*(range(len(b.options)) for b in mbids)):
        explored += 1
        r = s = Fraction(0)
        v = Fraction(0)
        for k, j in enumerate(pick):
            d = mbids[k].options[j][0]
            r += d.re
            s += d.im
            v += opt_values[k][j]
        if box is not None:
            ok = r >= 0 and s >= 0 and r <= rhs_re and s <= rhs_im
        else:
            ok = r * r + s * s <= rhs
        if ok and v > best_value:
            best_value = v
            best_pick = pick
    chosen = [mbids[k].options[j][0] for k, j in enumerate(best_pick)]
    witness = build_allocation(inst.bids, chosen)
    return OracleResult(best_value, witness, explored)


def brute_force_exact_fit(items: Sequence, c1: int, c2: int,
                          limits: Limits = DEFAULT_LIMITS) -> Optional[tuple]:
    """Exact max over subsets of grid items summing exactly to (c1, c2).

    items: (value, GridPoint) pairs with nonnegative coordinates.  Returns
    (value, frozenset of ids) or None when no subset fits exactly.
    """
    n = len(items)
    if n > limits.max_oracle_users:
        raise OracleCap(f"{n} items exceed the oracle cap")
    if c1 < 0 or c2 < 0:
        raise InvalidParams("targets must be nonnegative")
    best = None
    best_mask = None
    for mask in range(1 << n):
        a = b = 0
        v = Fraction(0)
        for k in range(n):
            if mask >> k & 1:
                val, cell = items[k]
                a += cell.re_idx
                b += cell.im_idx
                v += val
        if (a, b) == (c1, c2) and (best is None or v > best):
            best = v
            best_mask = mask
    if best is None:
        return None
    return best, frozenset(k for k in range(n) if best_mask >> k & 1)
