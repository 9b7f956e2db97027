"""Range-based approximation for box-constrained multi-minded allocation.

Works on m-dimensional nonnegative demand vectors under a componentwise
capacity vector c (a first-quadrant complex instance maps to m = 2 with a
caller-supplied box).  The scheme:

1. enumerate every candidate heavy set: a subset N of min(n, ceil(m/eps))
   users together with a feasible choice of one declared option each;
2. divide the residual capacity on each axis into (n - |N|)^2 buckets of
   size b_i and let the remaining users pick integer bucket multiples
   r with a per-axis total of at most (n - |N|)^2, solved exactly by a
   small dynamic program valued through the closure at b * r;
3. map bucket multiples back to declared options dominated by them.

The returned allocation never violates any axis capacity, and its value is
at least (1 - eps) times the optimum: the optimum's top-value users form
one of the enumerated heavy sets, and rounding the rest up to bucket
multiples stays feasible after dropping one maximal user per axis, whose
value is at most an eps fraction of the heavy set's.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Iterator, Optional, Sequence

from .errors import (CombinatorialCap, InternalInconsistency, InvalidParams)
from .limits import DEFAULT_LIMITS, Limits
from .model import as_multi, frac


@dataclass(frozen=True)
class BoxBid:
    """Multi-minded bid over m-dimensional nonnegative demand vectors.

    options: ((vector, value), ...); the zero vector with value 0 is always
    a member.
    """

    m: int
    options: tuple

    def __init__(self, m: int, options) -> None:
        opts = []
        has_zero = False
        for vec, value in options:
            vec = tuple(frac(x) for x in vec)
            value = frac(value)
            if len(vec) != m:
                raise InvalidParams(f"demand vector {vec} is not {m}-dimensional")
            if any(x < 0 for x in vec):
                raise InvalidParams("box demands must be nonnegative")
            if value < 0:
                raise InvalidParams("bid values must be nonnegative")
            if all(x == 0 for x in vec):
                if value != 0:
                    raise InvalidParams(
                        "the zero demand is worth 0 by convention")
                has_zero = True
            opts.append((vec, value))
        if not has_zero:
            opts.insert(0, (tuple(Fraction(0) for _ in range(m)), Fraction(0)))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "options", tuple(opts))


def box_bid_from_complex(bid) -> BoxBid:
    """View a first-quadrant complex bid as a 2-axis box bid."""
    mbid = as_multi(bid)
    opts = []
    for d, v in mbid.options:
        if d.re < 0:
            raise InvalidParams("box form requires first-quadrant demands")
        opts.append(((d.re, d.im), v))
    return BoxBid(2, opts)


def box_closure(bid: BoxBid, target: Sequence[Fraction]) -> tuple:
    """(best value, achieving option index) among options under target."""
    best = Fraction(0)
    best_idx = None
    for idx, (vec, value) in enumerate(bid.options):
        if all(x <= t for x, t in zip(vec, target)):
            if best_idx is None or value > best:
                best = value
                best_idx = idx
    if best_idx is None:
        raise InternalInconsistency("zero option missing from a box bid")
    return best, best_idx


@dataclass(frozen=True)
class HeavySet:
    """A candidate set of enumerated users with their fixed option choice."""

    members: tuple  # user ids, ascending
    selection: tuple  # option index per member
    partial_total: tuple  # componentwise demand sum of the selection


@dataclass(frozen=True)
class BucketVector:
    """Per-axis bucket sizes: residual capacity over (outside count)^2.

    A zero entry marks a saturated axis; outside users are then forced to
    demand exactly zero there.
    """

    b: tuple


@dataclass
class PtasStats:
    heavy_sets: int = 0
    dp_states: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class PtasResult:
    chosen: tuple  # per-user demand vector
    chosen_options: tuple  # per-user option index into the bid
    total: tuple
    total_value: Fraction
    heavy: Optional[HeavySet]
    stats: PtasStats


def heavy_size(n: int, m: int, eps: Fraction) -> int:
    return min(n, math.ceil(Fraction(m) / eps))


def enumerate_heavy_sets(bids: Sequence[BoxBid], c: Sequence,
                         eps, limits: Limits = DEFAULT_LIMITS
                         ) -> Iterator[HeavySet]:
    """All (subset, option selection) pairs with feasible partial sums,
    in deterministic order."""
    eps = frac(eps)
    if not (0 < eps <= 1):
        raise InvalidParams("accuracy parameter must lie in (0, 1]")
    c = tuple(frac(x) for x in c)
    m = len(c)
    n = len(bids)
    size = heavy_size(n, m, eps)
    count = 0
    for members in combinations(range(n), size):
        for selection in product(*(range(len(bids[u].options))
                                   for u in members)):
            count += 1
            if count > limits.max_heavy_sets:
                raise CombinatorialCap(
                    f"heavy-set enumeration exceeds {limits.max_heavy_sets}")
            total = [Fraction(0)] * m
            ok = True
            for u, j in zip(members, selection):
                vec = bids[u].options[j][0]
                for i in range(m):
                    total[i] += vec[i]
            for i in range(m):
                if total[i] > c[i]:
                    ok = False
                    break
            if ok:
                yield HeavySet(members, selection, tuple(total))


def bucket_vector(c: Sequence, partial_total: Sequence,
                  outside_count: int) -> BucketVector:
    """Bucket sizes b_i = (c_i - partial_i) / outside_count^2."""
    if outside_count < 1:
        raise InvalidParams("no users outside the heavy set")
    b = []
    for ci, pi in zip(c, partial_total):
        resid = frac(ci) - frac(pi)
        if resid < 0:
            raise InvalidParams("infeasible heavy selection")
        b.append(resid / (outside_count * outside_count))
    return BucketVector(tuple(b))


def _bucket_candidates(bid: BoxBid, b: BucketVector, r_cap: int, scale: int):
    """Per-user candidate (r-vector, scaled value, achieving option) list.

    Restricting candidates to the componentwise ceilings of declared
    options (plus zero) loses nothing: shrinking any r-vector to the
    ceiling of its best dominated option keeps the value and frees budget,
    and the budget constraint is downward closed.
    """
    m = bid.m
    zero_r = tuple(0 for _ in range(m))
    _, zidx = box_closure(bid, tuple(Fraction(0) for _ in range(m)))
    cands = [(zero_r, 0, zidx)]
    seen = {zero_r}
    for vec, _ in bid.options:
        r = []
        ok = True
        for x, bi in zip(vec, b.b):
            if bi == 0:
                if x != 0:
                    ok = False
                    break
                r.append(0)
            else:
                ri = math.ceil(x / bi)
                if ri > r_cap:
                    ok = False
                    break
                r.append(ri)
        if not ok:
            continue
        r = tuple(r)
        if r in seen:
            continue
        seen.add(r)
        target = tuple(ri * bi for ri, bi in zip(r, b.b))
        value, aidx = box_closure(bid, target)
        iv = value * scale
        if iv.denominator != 1:
            raise InternalInconsistency("value scale does not clear denominators")
        cands.append((r, int(iv), aidx))
    return cands


def bucket_dp(bids: Sequence[BoxBid], b: BucketVector, r_cap: int,
              limits: Limits = DEFAULT_LIMITS) -> tuple:
    """Optimal bucket-multiple assignment for the users outside a heavy set.

    Maximizes the total closure value of b * r_k subject to a per-axis
    total of at most r_cap.  Returns (value: Fraction, assignment: list of
    r-vectors, achieved options: list of option indices, states examined).
    """
    if r_cap < 0:
        raise InvalidParams("negative bucket cap")
    scale = 1
    for bid in bids:
        for _, v in bid.options:
            scale = scale * v.denominator // gcd(scale, v.denominator)
    m = len(b.b)
    zero = tuple(0 for _ in range(m))
    cands = [_bucket_candidates(bid, b, r_cap, scale) for bid in bids]
    states = {zero: 0}
    layers = []
    examined = 0
    for user_cands in cands:
        layer = {}
        new_states = {}
        for s in sorted(states):
            v = states[s]
            for j, (r, val, _) in enumerate(user_cands):
                ns = tuple(si + ri for si, ri in zip(s, r))
                if any(x > r_cap for x in ns):
                    continue
                examined += 1
                nv = v + val
                cur = new_states.get(ns)
                if cur is None or nv > cur:
                    new_states[ns] = nv
                    layer[ns] = (s, j)
        if examined > limits.max_table_cells:
            raise CombinatorialCap(
                f"bucket DP exceeds {limits.max_table_cells} transitions")
        states = new_states
        layers.append(layer)

    best_value = max(states.values())
    best_state = min(s for s, v in states.items() if v == best_value)
    # traceback
    picks = []
    s = best_state
    for layer in reversed(layers):
        parent, j = layer[s]
        picks.append(j)
        s = parent
    picks.reverse()
    assignment = [cands[k][j][0] for k, j in enumerate(picks)]
    achieved = [cands[k][j][2] for k, j in enumerate(picks)]
    value = Fraction(states[best_state], scale)
    return value, assignment, achieved, examined


def multi_mdkp_ptas(bids: Sequence[BoxBid], c: Sequence, eps,
                    limits: Limits = DEFAULT_LIMITS) -> PtasResult:
    """(1 - eps)-optimal allocation under componentwise capacities.

    Unlike the bi-criteria schemes, feasibility is strict: the returned
    totals never exceed any axis capacity.
    """
    t0 = time.perf_counter()
    eps = frac(eps)
    c = tuple(frac(x) for x in c)
    m = len(c)
    n = len(bids)
    for bid in bids:
        if bid.m != m:
            raise InvalidParams("bid dimension does not match the capacity vector")
    size = heavy_size(n, m, eps)
    outside_count = n - size

    best = None  # (value, heavy, chosen vectors, chosen option indices)
    stats = PtasStats()
    for heavy in enumerate_heavy_sets(bids, c, eps, limits):
        stats.heavy_sets += 1
        chosen = [None] * n
        chosen_opt = [None] * n
        value = Fraction(0)
        for u, j in zip(heavy.members, heavy.selection):
            vec = bids[u].options[j][0]
            # valued through the closure, like every other assignment
            v, aidx = box_closure(bids[u], vec)
            chosen[u] = bids[u].options[aidx][0]
            chosen_opt[u] = aidx
            value += v
        outside = [u for u in range(n) if u not in set(heavy.members)]
        if outside:
            r_cap = outside_count * outside_count
            b = bucket_vector(c, heavy.partial_total, outside_count)
            dp_value, assignment, achieved, examined = bucket_dp(
                [bids[u] for u in outside], b, r_cap, limits)
            stats.dp_states += examined
            # bucket totals stay within the residual by construction
            for i in range(m):
                used = sum(r[i] for r in assignment)
                if used * b.b[i] > c[i] - heavy.partial_total[i]:
                    raise InternalInconsistency("bucket totals exceed the residual")
            for u, aidx in zip(outside, achieved):
                chosen[u] = bids[u].options[aidx][0]
                chosen_opt[u] = aidx
            value += dp_value
        if best is None or value > best[0]:
            best = (value, heavy, list(chosen), list(chosen_opt))

    if best is None:
        raise InternalInconsistency("no feasible heavy set; zero selection "
                                    "should always qualify")
    value, heavy, chosen, chosen_opt = best
    total = tuple(sum((vec[i] for vec in chosen), Fraction(0))
                  for i in range(m))
    for i in range(m):
        if total[i] > c[i]:
            raise InternalInconsistency("strict feasibility violated")
    stats.wall_time = time.perf_counter() - t0
    return PtasResult(chosen=tuple(chosen), chosen_options=tuple(chosen_opt),
                      total=total, total_value=value, heavy=heavy,
                      stats=stats)
