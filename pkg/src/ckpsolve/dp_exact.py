"""Exact-fit dynamic programs over the rounding grid.

Two engines share the recurrences:

* a sparse engine keyed on reachable index sums, used by the approximation
  schemes, where each user contributes a handful of candidate grid cells
  (the roundings of her declared demands, plus the zero cell);
* a dense table engine used by the mechanism layer, where each user may
  occupy any cell of the grid box, so the state space is the full box.

Both compute, for a target pair of grid indices, the maximum total value of
per-user cell choices whose index sums hit the target exactly.  Values are
handled as exact integers (callers scale rationals onto a common
denominator); minus infinity is a distinct sentinel, never a large negative
value that could contaminate arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import numpy as np

from .errors import GridTooLarge, InternalInconsistency, InvalidParams
from .limits import DEFAULT_LIMITS, Limits
from .model import (MultiMindedBid, ZERO_DEMAND, as_multi, closure_value,
                    cx, partial_order_leq)
from .rounding import GridConfig, GridPoint, RoundedDemandSpace, round_demand

def value_scale(bids) -> int:
    """Common denominator clearing every declared value to an integer."""
    s = 1
    for bid in bids:
        for _, v in as_multi(bid).options:
            s = s * v.denominator // gcd(s, v.denominator)
    return s


# ---------------------------------------------------------------------------
# sparse engine


@dataclass
class SparseFit:
    """Result of a sparse exact-fit run.

    final: reachable (re, im) index sums -> best value.
    layers: per user, state -> (parent state, candidate index) for traceback.
    cells: transitions examined (the DP work measure).
    """

    final: dict
    layers: list
    cells: int


def sparse_exact_fit(user_cands: Sequence[Sequence], re_cap: int, im_cap: int,
                     limits: Limits = DEFAULT_LIMITS) -> SparseFit:
    """Run the exact-fit recurrence over per-user candidate cells.

    user_cands: per user, a list of ((re_idx, im_idx), value) pairs; the
    zero cell with value 0 must be first so that ties prefer leaving a user
    unallocated.  States beyond (re_cap, im_cap) are pruned: no guess ever
    reads them.
    """
    states = {(0, 0): 0}
    layers = []
    cells = 0
    for cands in user_cands:
        layer = {}
        new_states = {}
        for s in sorted(states):
            v = states[s]
            for j, ((ca, cb), val) in enumerate(cands):
                na, nb = s[0] + ca, s[1] + cb
                if na > re_cap or nb > im_cap:
                    continue
                cells += 1
                ns = (na, nb)
                nv = v + val
                cur = new_states.get(ns)
                if cur is None or nv > cur:
                    new_states[ns] = nv
                    layer[ns] = (s, j)
        if cells > limits.max_table_cells:
            raise GridTooLarge(
                f"exact-fit state space exceeded {limits.max_table_cells} "
                "transitions")
        states = new_states
        layers.append(layer)
    return SparseFit(final=states, layers=layers, cells=cells)


def sparse_traceback(fit: SparseFit, state) -> list:
    """Candidate index chosen for each user on the path to `state`."""
    if state not in fit.final:
        raise InternalInconsistency(f"state {state} is not reachable")
    choices = []
    for layer in reversed(fit.layers):
        parent, j = layer[state]
        choices.append(j)
        state = parent
    choices.reverse()
    return choices


def declared_cells(bid: MultiMindedBid, cfg: GridConfig, re_cap: int,
                   im_cap: int, scale: int = 1) -> list:
    """Candidate cells for one first-quadrant bid: zero plus the roundings
    of its declared demands, each valued at the closure of the cell.

    The closure of a grid cell only compares rounded coordinates: an option
    fits under the cell exactly when its rounding does, so no rational
    arithmetic is needed.  Values are returned scaled by `scale` as ints.
    """
    rounded = []
    for d, v in bid.options:
        if d.re < 0:
            raise InvalidParams("mirror second-quadrant bids before the DP")
        r = round_demand(d, cfg)
        rounded.append((r, v))
    cands = [(GridPoint(0, 0), 0)]
    seen = {GridPoint(0, 0)}
    for r, _ in rounded:
        if r in seen or r.re_idx > re_cap or r.im_idx > im_cap:
            continue
        seen.add(r)
        best = Fraction(0)
        for r2, v2 in rounded:
            if v2 > best and r2.re_idx <= r.re_idx and r2.im_idx <= r.im_idx:
                best = v2
        iv = best * scale
        if iv.denominator != 1:
            raise InternalInconsistency("value scale does not clear denominators")
        cands.append((r, int(iv)))
    return cands


# ---------------------------------------------------------------------------
# public operations


def two_dkp_exact(items: Sequence, c1: int, c2: int,
                  limits: Limits = DEFAULT_LIMITS) -> Optional[frozenset]:
    """Max-value subset of items whose grid demands sum exactly to (c1, c2).

    items: (value, GridPoint) pairs with nonnegative coordinates (callers
    with second-quadrant demands negate real parts first).  Returns the
    chosen item ids, or None when no subset fits exactly.  The empty subset
    is always an exact fit for (0, 0).
    """
    if c1 < 0 or c2 < 0:
        raise InvalidParams("targets must be nonnegative")
    cands = []
    for value, cell in items:
        if cell.re_idx < 0 or cell.im_idx < 0:
            raise InvalidParams("item coordinates must be nonnegative")
        if value < 0:
            raise InvalidParams("item values must be nonnegative")
        cands.append([(GridPoint(0, 0), Fraction(0)), (cell, value)])
    fit = sparse_exact_fit(cands, c1, c2, limits)
    if (c1, c2) not in fit.final:
        return None
    choices = sparse_traceback(fit, (c1, c2))
    return frozenset(i for i, j in enumerate(choices) if j == 1)


def multi_two_dkp_exact(bids: Sequence, xi: int, zeta: int,
                        dhat: RoundedDemandSpace, cfg: GridConfig,
                        limits: Limits = DEFAULT_LIMITS) -> Optional[dict]:
    """Per-user grid cells maximizing total closure value with index sums
    exactly (xi, zeta).

    bids: first-quadrant multi-minded bids (mirror second-quadrant users
    before calling; un-mirror with ``traceback_to_declared``).  Each user's
    cell comes from her rounded declared demands or the zero cell; closure
    values change only at those points.  Returns {user position: GridPoint}
    or None when the target is not an exact fit.
    """
    if (xi, zeta) not in dhat:
        raise InvalidParams("target outside the grid box")
    mbids = [as_multi(b) for b in bids]
    scale = value_scale(mbids)
    cands = [declared_cells(b, cfg, xi, zeta, scale) for b in mbids]
    fit = sparse_exact_fit(cands, xi, zeta, limits)
    if (xi, zeta) not in fit.final:
        return None
    choices = sparse_traceback(fit, (xi, zeta))
    return {u: cands[u][j][0] for u, j in enumerate(choices)}


def traceback_to_declared(assignment: dict, bids: Sequence, quadrant: int,
                          cfg: GridConfig) -> dict:
    """Map per-user grid cells back to declared demands.

    Each user receives a declared option dominated by her cell whose
    closure value equals the closure of the cell, so the allocation's value
    equals the table value.  Among qualifying options the one rounding back
    to the cell is preferred, then the one with the largest rounded real
    part: this keeps the allocation's rounded projections equal to the
    guessed totals, which is what the load-violation bound rests on.

    quadrant: +1 for first-quadrant users, -1 for second-quadrant users,
    whose bids are given un-mirrored and whose cells are mirrored indices.
    """
    if quadrant not in (1, -1):
        raise InvalidParams("quadrant must be +1 or -1")
    L = cfg.L
    out = {}
    for uid, cell in assignment.items():
        if cell == GridPoint(0, 0):
            out[uid] = ZERO_DEMAND
            continue
        mbid = as_multi(bids[uid])
        work = mbid.mirror() if quadrant < 0 else mbid
        target = cx(cell.re_idx * L, cell.im_idx * L)
        best = closure_value(work, target)
        cand = []
        for idx, (d, _) in enumerate(work.options):
            if not partial_order_leq(d, target):
                continue
            if closure_value(work, d) != best:
                continue
            r = round_demand(d, cfg)
            cand.append((0 if r == cell else 1, -r.re_idx, idx))
        if not cand:
            raise InternalInconsistency(
                f"user {uid}: no declared option achieves the cell value")
        _, _, idx = min(cand)
        d = mbid.options[idx][0]
        out[uid] = d
    return out


# ---------------------------------------------------------------------------
# dense engine (full grid-box cells; used by the mechanism layer)

INT64_NEG = -(1 << 62)
OBJ_NEG = -(1 << 200)


@dataclass
class DenseFit:
    """Dense exact-fit tables: value layers plus choice layers.

    layers[k] = (U, Choice) after placing user k; U[a, b] < 0 marks an
    unreachable state, Choice[a, b] encodes the linear index of the cell
    user k occupies in the best solution for (a, b).
    """

    layers: list
    a_max: int
    b_max: int
    cells: int

    @property
    def final(self):
        return self.layers[-1][0] if self.layers else None


def dense_exact_fit(value_grids: Sequence, a_max: int, b_max: int,
                    use_int64: bool, limits: Limits = DEFAULT_LIMITS) -> DenseFit:
    """Exact-fit DP where user k may occupy any cell of the box.

    value_grids: per user, a 2D array V with V[a, b] = scaled value of the
    user occupying cell (a, b); V[0, 0] must be 0.
    """
    A, B = a_max + 1, b_max + 1
    n = len(value_grids)
    if (n + 1) * A * B > limits.max_table_cells:
        raise GridTooLarge(
            f"{(n + 1) * A * B} dense cells exceed {limits.max_table_cells}")
    if use_int64:
        neg, dtype = INT64_NEG, np.int64
    else:
        neg, dtype = OBJ_NEG, object
    U = np.full((A, B), neg, dtype=dtype)
    U[0, 0] = 0
    layers = []
    cells = 0
    for V in value_grids:
        Uk = np.full((A, B), neg, dtype=dtype)
        Ck = np.full((A, B), -1, dtype=np.int32)
        for a in range(A):
            for b in range(B):
                val = V[a, b]
                cand = U[:A - a, :B - b] + val
                region = Uk[a:, b:]
                better = cand > region
                region[better] = cand[better]
                Ck[a:, b:][better] = a * B + b
        cells += A * B
        layers.append((Uk, Ck))
        U = Uk
    return DenseFit(layers=layers, a_max=a_max, b_max=b_max, cells=cells)


def dense_feasible(fit: DenseFit, a: int, b: int) -> bool:
    return bool(fit.layers) and fit.layers[-1][0][a, b] >= 0


def dense_traceback(fit: DenseFit, a: int, b: int) -> list:
    """Cell occupied by each user on the best path to state (a, b)."""
    if not dense_feasible(fit, a, b):
        raise InternalInconsistency(f"state ({a}, {b}) is not reachable")
    B = fit.b_max + 1
    cells = []
    for Uk, Ck in reversed(fit.layers):
        j = int(Ck[a, b])
        if j < 0:
            raise InternalInconsistency("broken traceback pointer")
        ca, cb = divmod(j, B)
        cells.append(GridPoint(ca, cb))
        a -= ca
        b -= cb
    if (a, b) != (0, 0):
        raise InternalInconsistency("traceback did not return to the origin")
    cells.reverse()
    return cells


def closure_value_grid(bid: MultiMindedBid, cfg: GridConfig, a_max: int,
                       b_max: int, scale: int, use_int64: bool):
    """2D array of scaled closure values over the whole grid box.

    Entry (a, b) is the best declared value among options whose rounding is
    dominated by (a, b); computed by placing each rounded option and taking
    running maxima along both axes.
    """
    A, B = a_max + 1, b_max + 1
    dtype = np.int64 if use_int64 else object
    V = np.zeros((A, B), dtype=dtype)
    for d, v in bid.options:
        if d.re < 0:
            raise InvalidParams("mirror second-quadrant bids before the DP")
        r = round_demand(d, cfg)
        if r.re_idx > a_max or r.im_idx > b_max:
            raise InvalidParams(
                f"rounded demand {r} falls outside the {a_max}x{b_max} box")
        iv = v * scale
        if iv.denominator != 1:
            raise InternalInconsistency("value scale does not clear denominators")
        iv = int(iv)
        if iv > V[r.re_idx, r.im_idx]:
            V[r.re_idx, r.im_idx] = iv
    V = np.maximum.accumulate(V, axis=0)
    V = np.maximum.accumulate(V, axis=1)
    return V
