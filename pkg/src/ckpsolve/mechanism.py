"""Truthful allocation: welfare maximization over a fixed range, with
pivot payments computed against the same range.

The range is determined entirely by the public parameters (capacity C,
user count n, accuracy eps, power-factor bound P): it consists of all
per-user grid-cell assignments, over the full grid box, whose side-wise
index sums form an admissible guess tuple.  Because the range never
depends on the declarations, exact welfare maximization over it plus
pivot payments yields a mechanism in which no misreport can increase a
user's utility.

Unlike the solver path, users here may occupy any cell of the box (not
just roundings of their declared demands): that is what makes the
optimization exactly maximal-in-range.  Each user is finally handed a
declared demand dominated by her cell with the same closure value, so
reported welfare is preserved; mechanism outcomes carry no load-violation
guarantee beyond the admissibility of the winning guess.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import GridTooLarge, InternalInconsistency, InvalidParams
from .limits import DEFAULT_LIMITS, Limits
from .model import (Allocation, Instance, MultiMindedBid, ZERO_DEMAND,
                    as_multi, build_allocation, closure_value)
from .dp_exact import (closure_value_grid, dense_exact_fit,
                       dense_traceback, traceback_to_declared, value_scale)
from .fptas import GuessTuple
from .rounding import (GridConfig, GridPoint, ProjectionGrids, grid_unit,
                       projection_grids)


@dataclass(frozen=True)
class RangeDescriptor:
    """A fixed outcome range, identified by a canonical hash.

    Two bid profiles sharing (C, n, eps, P) get byte-identical descriptors;
    the hash never sees a declaration.
    """

    cfg: GridConfig
    grids: ProjectionGrids
    range_hash: str


def build_range(C, n: int, eps, P,
                limits: Limits = DEFAULT_LIMITS) -> RangeDescriptor:
    cfg = grid_unit(C, n, eps, P)
    grids = projection_grids(cfg, limits)
    if grids.guess_space_size() > limits.max_range_guesses:
        raise GridTooLarge(
            f"{grids.guess_space_size()} guess tuples exceed the range cap "
            f"{limits.max_range_guesses}")
    payload = json.dumps(
        {"grid": cfg.to_json_dict(),
         "ranges": [grids.a_plus_max, grids.a_minus_max, grids.b_max]},
        sort_keys=True)
    h = hashlib.sha256(payload.encode()).hexdigest()
    return RangeDescriptor(cfg=cfg, grids=grids, range_hash=h)


_GUESS_CACHE: dict = {}


def _guess_arrays(rng: RangeDescriptor):
    """Admissible guesses as an (m, 4) index array in lexicographic order.

    The quadratic test runs in scaled integers: with r2 = ((1+2e)C/L)^2 =
    num/den, a guess is admissible iff ((a-c)^2 + (b+d)^2) * den <= num.
    """
    key = rng.range_hash
    if key not in _GUESS_CACHE:
        grids = rng.grids
        r2 = ((1 + 2 * rng.cfg.epsilon) * rng.cfg.C / rng.cfg.L) ** 2
        num, den = r2.numerator, r2.denominator
        a, c, b, d = np.meshgrid(
            np.arange(grids.a_plus_size, dtype=np.int64),
            np.arange(grids.a_minus_size, dtype=np.int64),
            np.arange(grids.b_size, dtype=np.int64),
            np.arange(grids.b_size, dtype=np.int64),
            indexing="ij")
        quad = np.stack([a, c, b, d], axis=-1).reshape(-1, 4)
        dx = quad[:, 0] - quad[:, 1]
        dy = quad[:, 2] + quad[:, 3]
        ok = (dx * dx + dy * dy) * den <= num
        _GUESS_CACHE[key] = quad[ok]
    return _GUESS_CACHE[key]


def admissible_guesses(rng: RangeDescriptor) -> list:
    """Every guess tuple over the grids passing the quadratic test, in
    lexicographic order."""
    return [GuessTuple(*(int(x) for x in row)) for row in _guess_arrays(rng)]


@dataclass
class MechanismStats:
    solver_calls: int = 0
    guesses: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class MechanismOutcome:
    allocation: Allocation
    payments: tuple  # Fraction per user
    range_hash: str
    stats: MechanismStats


def _validate_bids(bids: Sequence, rng: RangeDescriptor) -> list:
    if len(bids) != rng.cfg.n:
        raise InvalidParams("bid count does not match the range's n")
    # reuse instance validation for demand/quadrant rules
    Instance(rng.cfg.C, bids, rng.cfg.P)
    return [as_multi(b) for b in bids]


def _range_optimize(mbids: Sequence[MultiMindedBid], rng: RangeDescriptor,
                    scale: int, zero_user: Optional[int],
                    limits: Limits, stats: MechanismStats):
    """Exact welfare maximum over the fixed range.

    Returns (scaled welfare, {user: cell or mirrored cell}, guess).  With
    zero_user set, that user's valuation is zeroed but she still occupies
    cells: the range itself never changes.
    """
    stats.solver_calls += 1
    cfg, grids = rng.cfg, rng.grids
    n = len(mbids)
    plus, minus = [], []
    for uid, bid in enumerate(mbids):
        side_plus = True
        for d, _ in bid.nonzero_options():
            if d.re < 0:
                side_plus = False
                break
        (plus if side_plus else minus).append(uid)

    max_scaled = 0
    for bid in mbids:
        best = max(v for _, v in bid.options)
        max_scaled += int(best * scale)
    use_int64 = (max_scaled + 1) < (1 << 60)

    grids_v = {}
    for side, ids, a_max in (("+", plus, grids.a_plus_max),
                             ("-", minus, grids.a_minus_max)):
        vals = []
        for uid in ids:
            bid = mbids[uid]
            if side == "-":
                bid = bid.mirror()
            if uid == zero_user:
                A, B = a_max + 1, grids.b_max + 1
                v = np.zeros((A, B), dtype=np.int64 if use_int64 else object)
            else:
                v = closure_value_grid(bid, cfg, a_max, grids.b_max, scale,
                                       use_int64)
            vals.append(v)
        grids_v[side] = vals

    fit_p = dense_exact_fit(grids_v["+"], grids.a_plus_max, grids.b_max,
                            use_int64, limits)
    fit_m = dense_exact_fit(grids_v["-"], grids.a_minus_max, grids.b_max,
                            use_int64, limits)
    up = fit_p.final if fit_p.layers else None
    um = fit_m.final if fit_m.layers else None

    guesses = _guess_arrays(rng)
    stats.guesses += len(guesses)
    a, c, b, d = (guesses[:, 0], guesses[:, 1], guesses[:, 2], guesses[:, 3])

    def side_values(u, idx_a, idx_b):
        if u is None:
            # no users on this side: only the zero sum is reachable
            zero = (idx_a == 0) & (idx_b == 0)
            w = np.where(zero, 0, -1)
            return w if use_int64 else w.astype(object)
        return u[idx_a, idx_b]

    wp = side_values(up, a, b)
    wm = side_values(um, c, d)
    neg = (wp < 0) | (wm < 0)
    w = wp + wm
    if use_int64:
        w = np.where(neg, np.int64(-1), w)
        best_idx = int(np.argmax(w))
        best_w = int(w[best_idx])
    else:
        best_w, best_idx = -1, 0
        for i in range(len(w)):
            if not neg[i] and w[i] > best_w:
                best_w, best_idx = w[i], i
    if best_w <= 0:
        # the all-zero outcome is always in the range
        cells = {uid: (0, 0) for uid in range(n)}
        return 0, cells, GuessTuple(0, 0, 0, 0)

    g = GuessTuple(*(int(x) for x in guesses[best_idx]))
    cells = {}
    if plus:
        path = dense_traceback(fit_p, g.xi_plus, g.zeta_plus)
        for uid, cell in zip(plus, path):
            cells[uid] = cell
    if minus:
        path = dense_traceback(fit_m, g.xi_minus, g.zeta_minus)
        for uid, cell in zip(minus, path):
            cells[uid] = cell
    return best_w, cells, g


def _handed_demand(bid: MultiMindedBid, cell, cfg: GridConfig,
                   mirrored: bool):
    """A declared option dominated by the cell achieving its closure value."""
    d = traceback_to_declared({0: cell}, [bid], -1 if mirrored else 1, cfg)
    return d[0]


def mir_allocate(bids: Sequence, rng: RangeDescriptor,
                 limits: Limits = DEFAULT_LIMITS,
                 _stats: Optional[MechanismStats] = None) -> Allocation:
    """Allocation maximizing reported welfare over the fixed range."""
    stats = _stats if _stats is not None else MechanismStats()
    mbids = _validate_bids(bids, rng)
    scale = value_scale(bids)
    w, cells, _ = _range_optimize(mbids, rng, scale, None, limits, stats)
    chosen = []
    for uid, bid in enumerate(mbids):
        cell = GridPoint(*cells[uid])
        if cell == GridPoint(0, 0):
            chosen.append(ZERO_DEMAND)
            continue
        mirrored = any(d.re < 0 for d, _ in bid.nonzero_options())
        chosen.append(_handed_demand(bid, cell, rng.cfg, mirrored))
    alloc = build_allocation(bids, chosen)
    if alloc.total_value * scale != w:
        raise InternalInconsistency("handed demands lose reported welfare")
    return alloc


def vcg_payments(bids: Sequence, rng: RangeDescriptor, alloc: Allocation,
                 limits: Limits = DEFAULT_LIMITS,
                 _stats: Optional[MechanismStats] = None) -> tuple:
    """Pivot payments over the same range the allocation maximized.

    p_k = (best welfare with user k's valuation zeroed)
        - (welfare of the others at the chosen allocation).
    Always within [0, reported value of k's allocated demand].
    """
    stats = _stats if _stats is not None else MechanismStats()
    mbids = _validate_bids(bids, rng)
    scale = value_scale(bids)
    w_base = alloc.total_value
    payments = []
    for k in range(len(bids)):
        v_k = closure_value(bids[k], alloc.chosen[k])
        w_minus, _, _ = _range_optimize(mbids, rng, scale, k, limits, stats)
        p = Fraction(w_minus, scale) - (w_base - v_k)
        if p < 0 or p > v_k:
            raise InternalInconsistency(
                f"pivot payment {p} for user {k} outside [0, {v_k}]")
        payments.append(p)
    return tuple(payments)


def mechanism_outcome(bids: Sequence, rng: RangeDescriptor,
                      limits: Limits = DEFAULT_LIMITS) -> MechanismOutcome:
    """Run the full mechanism: one base optimization plus n pivots."""
    t0 = time.perf_counter()
    stats = MechanismStats()
    alloc = mir_allocate(bids, rng, limits, _stats=stats)
    payments = vcg_payments(bids, rng, alloc, limits, _stats=stats)
    stats.wall_time = time.perf_counter() - t0
    return MechanismOutcome(allocation=alloc, payments=payments,
                            range_hash=rng.range_hash, stats=stats)


def misreport_trial(true_bids: Sequence, liar: int, fake_bid,
                    rng: RangeDescriptor, limits: Limits = DEFAULT_LIMITS,
                    truth_outcome: Optional[MechanismOutcome] = None) -> tuple:
    """Utilities of one user under truthful reporting versus one lie.

    Both utilities are measured with the user's true valuation (through the
    closure of her true bid) at whatever demand the mechanism hands her.
    Returns (utility_truth, utility_lie); a truthful mechanism never has
    the second exceed the first.
    """
    if not (0 <= liar < len(true_bids)):
        raise InvalidParams("liar index out of range")
    fake = as_multi(fake_bid)
    # the fake must be a legal declaration on its own (raises
    # MixedQuadrantBid / InvalidParams otherwise)
    Instance(rng.cfg.C, [fake], rng.cfg.P)
    if truth_outcome is None:
        truth_outcome = mechanism_outcome(true_bids, rng, limits)
    lie_bids = list(true_bids)
    lie_bids[liar] = fake
    lie_outcome = mechanism_outcome(lie_bids, rng, limits)

    true_bid = true_bids[liar]
    u_truth = closure_value(true_bid, truth_outcome.allocation.chosen[liar]) \
        - truth_outcome.payments[liar]
    u_lie = closure_value(true_bid, lie_outcome.allocation.chosen[liar]) \
        - lie_outcome.payments[liar]
    return u_truth, u_lie
