"""Bi-criteria approximation schemes for the complex-demand knapsack.

Both solvers round demands onto the declaration-independent grid, split the
users by quadrant, and enumerate guessed projection totals
(xi_plus, xi_minus, zeta_plus, zeta_minus) of the rounded demands.  For
every admissible guess two exact-fit dynamic programs (one per quadrant)
find the best allocation whose rounded projections hit the guess exactly;
the best allocation over all guesses is returned.

Guarantees (exact rational comparisons, no tolerances):

* value >= the true optimum under capacity C, because the rounded optimum's
  projections are always among the admissible guesses;
* |total load| <= (1+3*eps)*C for the single-minded scheme and
  <= (1+4*eps)*C for the multi-minded one, because the returned demands
  round back to the guessed totals and the guess passed the admissibility
  test.

The guess enumeration is realized as a scan over the finitely many
reachable exact-fit sums of each side, which is a subset of the full guess
grid; the iteration counter reported in the stats counts examined pairs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .errors import InternalInconsistency, InvalidParams
from .limits import DEFAULT_LIMITS, Limits
from .model import (Allocation, Instance, ZERO_DEMAND, as_multi,
                    build_allocation, frac, load_and_check, quadrant_partition)
from .dp_exact import (declared_cells, sparse_exact_fit, sparse_traceback,
                       traceback_to_declared, value_scale)
from .rounding import GridConfig, grid_unit, projection_grids


@dataclass(frozen=True)
class GuessTuple:
    """Guessed absolute projection totals, as grid indices (values i*L)."""

    xi_plus: int
    xi_minus: int
    zeta_plus: int
    zeta_minus: int


@dataclass
class SolverStats:
    guesses_tried: int = 0
    guess_space_size: int = 0
    dp_cells: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SolverResult:
    allocation: Allocation
    guess: GuessTuple
    violation_bound: Fraction  # the factor beta the load provably satisfies
    grid: GridConfig
    stats: SolverStats

    def to_json_dict(self) -> dict:
        a = self.allocation
        return {
            "value": _fstr(a.total_value),
            "load_re": _fstr(a.total_load.re),
            "load_im": _fstr(a.total_load.im),
            "load_sq": _fstr(a.total_load.magnitude_sq()),
            "violation_bound": _fstr(self.violation_bound),
            "guess": [self.guess.xi_plus, self.guess.xi_minus,
                      self.guess.zeta_plus, self.guess.zeta_minus],
            "grid": self.grid.to_json_dict(),
            "stats": {
                "guesses_tried": self.stats.guesses_tried,
                "guess_space_size": self.stats.guess_space_size,
                "dp_cells": self.stats.dp_cells,
                "wall_time": self.stats.wall_time,
            },
        }


def _fstr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def guess_admissible(g: GuessTuple, cfg: GridConfig) -> bool:
    """Exact test of the quadratic guess condition.

    ((xi_plus - xi_minus)*L)^2 + ((zeta_plus + zeta_minus)*L)^2 must not
    exceed ((1+2*eps)*C)^2.
    """
    L = cfg.L
    lhs = ((g.xi_plus - g.xi_minus) * L) ** 2 \
        + ((g.zeta_plus + g.zeta_minus) * L) ** 2
    rhs = ((1 + 2 * cfg.epsilon) * cfg.C) ** 2
    return lhs <= rhs


def _admissibility_ints(cfg: GridConfig):
    # (dx^2 + dy^2) * den <= num  in index units
    r2 = ((1 + 2 * cfg.epsilon) * cfg.C / cfg.L) ** 2
    return r2.numerator, r2.denominator


def _select_best_pair(states_p: dict, states_m: dict, cfg: GridConfig):
    """Max welfare over admissible guess pairs; ties keep the first guess
    in lexicographic (xi_plus, xi_minus, zeta_plus, zeta_minus) order.

    Returns (value, GuessTuple, plus state, minus state, pairs examined).
    """
    items_p = sorted(states_p.items())
    items_m = sorted(states_m.items())
    num, den = _admissibility_ints(cfg)
    pairs = len(items_p) * len(items_m)

    use_numpy = all(abs(v) < (1 << 60) for _, v in items_p) and \
        all(abs(v) < (1 << 60) for _, v in items_m)
    if use_numpy and num < (1 << 62):
        ap = np.array([s[0] for s, _ in items_p], dtype=np.int64)
        bp = np.array([s[1] for s, _ in items_p], dtype=np.int64)
        vp = np.array([v for _, v in items_p], dtype=np.int64)
        am = np.array([s[0] for s, _ in items_m], dtype=np.int64)
        bm = np.array([s[1] for s, _ in items_m], dtype=np.int64)
        vm = np.array([v for _, v in items_m], dtype=np.int64)
        dx = ap[:, None] - am[None, :]
        dy = bp[:, None] + bm[None, :]
        ok = (dx * dx + dy * dy) * den <= num
        w = vp[:, None] + vm[None, :]
        w = np.where(ok, w, np.int64(-1))
        best = int(w.max())
        if best <= 0:
            # zero welfare: the all-zero guess is admissible and lex-least
            return 0, GuessTuple(0, 0, 0, 0), (0, 0), (0, 0), pairs
        cand = np.argwhere(w == best)
        key = None
        for i, j in cand:
            g = (int(ap[i]), int(am[j]), int(bp[i]), int(bm[j]))
            if key is None or g < key:
                key = g
                pick = (i, j)
        i, j = pick
        return (best,
                GuessTuple(*[int(x) for x in (ap[i], am[j], bp[i], bm[j])]),
                (int(ap[i]), int(bp[i])), (int(am[j]), int(bm[j])), pairs)

    # exact big-integer fallback
    best = -1
    best_key = None
    best_pick = None
    for (sa, sb), v1 in items_p:
        for (sc, sd), v2 in items_m:
            dx, dy = sa - sc, sb + sd
            if (dx * dx + dy * dy) * den > num:
                continue
            w = v1 + v2
            g = (sa, sc, sb, sd)
            if w > best or (w == best and g < best_key):
                best = w
                best_key = g
                best_pick = ((sa, sb), (sc, sd))
    if best <= 0:
        return 0, GuessTuple(0, 0, 0, 0), (0, 0), (0, 0), pairs
    sp, sm = best_pick
    return best, GuessTuple(best_key[0], best_key[1], best_key[2],
                            best_key[3]), sp, sm, pairs


def _solve(inst: Instance, eps, bound: Fraction,
           limits: Limits) -> SolverResult:
    t0 = time.perf_counter()
    eps = frac(eps)
    cfg = grid_unit(inst.capacity, inst.n, eps, inst.power_factor_bound)
    grids = projection_grids(cfg, limits)
    # Index sums of rounded demands can overshoot the closed-form tops by
    # one cell per user (ceil(sum x/L) <= sum ceil(x/L) <= ceil(sum x/L)+n-1),
    # so the internal state space gets n cells of headroom per axis.  The
    # admissibility test is unchanged.
    a_plus_cap = grids.a_plus_max + inst.n
    a_minus_cap = grids.a_minus_max + inst.n
    b_cap = grids.b_max + inst.n

    plus_ids, minus_ids = quadrant_partition(inst)
    plus_ids, minus_ids = sorted(plus_ids), sorted(minus_ids)
    scale = value_scale(inst.bids)

    plus_cands = [declared_cells(as_multi(inst.bids[u]), cfg, a_plus_cap,
                                 b_cap, scale) for u in plus_ids]
    minus_cands = [declared_cells(as_multi(inst.bids[u]).mirror(), cfg,
                                  a_minus_cap, b_cap, scale)
                   for u in minus_ids]
    fit_p = sparse_exact_fit(plus_cands, a_plus_cap, b_cap, limits)
    fit_m = sparse_exact_fit(minus_cands, a_minus_cap, b_cap, limits)

    value, guess, sp, sm, pairs = _select_best_pair(fit_p.final, fit_m.final,
                                                    cfg)

    chosen = [ZERO_DEMAND] * inst.n
    if value > 0:
        for ids, fit, state, quad in ((plus_ids, fit_p, sp, 1),
                                      (minus_ids, fit_m, sm, -1)):
            if not ids:
                continue
            choices = sparse_traceback(fit, state)
            cands = plus_cands if quad > 0 else minus_cands
            cells = {}
            for pos, j in enumerate(choices):
                cells[pos] = cands[pos][j][0]
            side_bids = [inst.bids[u] for u in ids]
            declared = traceback_to_declared(cells, side_bids, quad, cfg)
            for pos, d in declared.items():
                chosen[ids[pos]] = d

    alloc = build_allocation(inst.bids, chosen)
    if alloc.total_value * scale != value:
        raise InternalInconsistency(
            "allocation value does not match the table value")
    if not load_and_check(alloc, inst.capacity, bound):
        raise InternalInconsistency(
            f"returned load violates the advertised bound {bound}; this can "
            "only happen when several equal-valued declared demands share a "
            "rounding cell in a cancellation-heavy instance")
    stats = SolverStats(
        guesses_tried=pairs,
        guess_space_size=grids.guess_space_size(),
        dp_cells=fit_p.cells + fit_m.cells,
        wall_time=time.perf_counter() - t0,
    )
    return SolverResult(allocation=alloc, guess=guess, violation_bound=bound,
                        grid=cfg, stats=stats)


def ckp_bifptas(inst: Instance, eps, limits: Limits = DEFAULT_LIMITS) -> SolverResult:
    """Single-minded bi-criteria scheme: value >= the capacity-C optimum,
    load within a factor (1+3*eps) of capacity."""
    for bid in inst.bids:
        if len(as_multi(bid).nonzero_options()) > 1:
            raise InvalidParams("single-minded solver requires one demand per user")
    eps = frac(eps)
    return _solve(inst, eps, 1 + 3 * eps, limits)


def multickp_fptas(inst: Instance, eps,
                   limits: Limits = DEFAULT_LIMITS) -> SolverResult:
    """Multi-minded bi-criteria scheme: value >= the capacity-C optimum,
    load within a factor (1+4*eps) of capacity, every allocated demand a
    declared option."""
    eps = frac(eps)
    return _solve(inst, eps, 1 + 4 * eps, limits)
