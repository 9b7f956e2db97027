"""Grid unit, demand rounding, and declaration-independent projection grids.

The grid unit L = eps * C / (n * (P + 1)) depends only on the public
parameters (C, n, eps, P), never on the declared demands: two instances
sharing those parameters get byte-identical grids.  All downstream dynamic
programs work in integer index space (a grid point (a, b) stands for the
demand (a*L, b*L)), so no rational arithmetic appears inside DP inner loops.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

from .errors import GridTooLarge, InvalidParams
from .limits import DEFAULT_LIMITS, Limits
from .model import ComplexRational, RationalLike, frac


@dataclass(frozen=True)
class GridConfig:
    """Grid unit plus the public parameters it was derived from."""

    L: Fraction
    C: Fraction
    n: int
    epsilon: Fraction
    P: Fraction

    def __post_init__(self):
        if self.L != self.epsilon * self.C / (self.n * (self.P + 1)):
            raise InvalidParams("grid unit does not match its parameters")

    def to_json_dict(self) -> dict:
        return {
            "L": f"{self.L.numerator}/{self.L.denominator}",
            "C": f"{self.C.numerator}/{self.C.denominator}",
            "n": self.n,
            "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "P": f"{self.P.numerator}/{self.P.denominator}",
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


class GridPoint(NamedTuple):
    """Integer grid coordinates; the demand is (re_idx * L, im_idx * L)."""

    re_idx: int
    im_idx: int


def grid_unit(C: RationalLike, n: int, eps: RationalLike,
              P: RationalLike) -> GridConfig:
    """Build the grid configuration L = eps*C / (n*(P+1))."""
    C, eps, P = frac(C), frac(eps), frac(P)
    if C <= 0:
        raise InvalidParams("capacity must be positive")
    if n < 1:
        raise InvalidParams("need at least one user")
    if not (0 < eps <= 1):
        raise InvalidParams("accuracy parameter must lie in (0, 1]")
    if P < 1:
        raise InvalidParams("power factor bound must be at least 1")
    L = eps * C / (n * (P + 1))
    return GridConfig(L=L, C=C, n=n, epsilon=eps, P=P)


def round_demand(d: ComplexRational, cfg: GridConfig) -> GridPoint:
    """Round a demand onto the grid, never shrinking either component.

    The real part is ceiled when nonnegative and floored when negative
    (i.e. always pushed away from zero); the imaginary part is always
    ceiled.  Signs are preserved and grid-aligned demands are fixed points.
    """
    if d.im < 0:
        raise InvalidParams("demand below the real axis")
    L = cfg.L
    if d.re >= 0:
        re_idx = math.ceil(d.re / L)
    else:
        re_idx = math.floor(d.re / L)
    return GridPoint(re_idx, math.ceil(d.im / L))


@dataclass(frozen=True)
class ProjectionGrids:
    """Index ranges for the guessed projection totals.

    a_plus_max, a_minus_max, b_max are the top indices of the three ranges
    (each range starts at 0; index i stands for the value i*L).  They
    depend only on (C, n, eps, P).
    """

    a_plus_max: int
    a_minus_max: int
    b_max: int

    @property
    def a_plus_size(self) -> int:
        return self.a_plus_max + 1

    @property
    def a_minus_size(self) -> int:
        return self.a_minus_max + 1

    @property
    def b_size(self) -> int:
        return self.b_max + 1

    def guess_space_size(self) -> int:
        """Closed-form count of raw guess tuples over the three ranges."""
        return self.a_plus_size * self.a_minus_size * self.b_size * self.b_size

    def serialize(self) -> str:
        return json.dumps(
            {"a_plus_max": self.a_plus_max, "a_minus_max": self.a_minus_max,
             "b_max": self.b_max}, sort_keys=True)


def projection_grids(cfg: GridConfig,
                     limits: Limits = DEFAULT_LIMITS) -> ProjectionGrids:
    """The three index ranges, with the exact ceilings.

    a_plus covers 0..ceil(C*(1+P)/L), a_minus covers 0..ceil(C*P/L), and
    b covers 0..ceil(C/L).
    """
    grids = ProjectionGrids(
        a_plus_max=math.ceil(cfg.C * (1 + cfg.P) / cfg.L),
        a_minus_max=math.ceil(cfg.C * cfg.P / cfg.L),
        b_max=math.ceil(cfg.C / cfg.L),
    )
    # n per-user table layers over the largest box is the dominant memory用.
    cells = cfg.n * grids.a_plus_size * grids.b_size
    if cells > limits.max_table_cells:
        raise GridTooLarge(
            f"{cells} table cells exceed the cap {limits.max_table_cells}; "
            "shrink n, grow eps, or raise the cap")
    return grids


class RoundedDemandSpace:
    """The first-quadrant box of grid points with re in a_plus and im in b.

    Second-quadrant demands are handled by mirroring, so a single box
    serves both sides.  Iteration order is lexicographic.
    """

    def __init__(self, re_max: int, im_max: int):
        self.re_max = re_max
        self.im_max = im_max

    def __len__(self) -> int:
        return (self.re_max + 1) * (self.im_max + 1)

    def __contains__(self, p) -> bool:
        return 0 <= p[0] <= self.re_max and 0 <= p[1] <= self.im_max

    def __iter__(self) -> Iterator[GridPoint]:
        for a in range(self.re_max + 1):
            for b in range(self.im_max + 1):
                yield GridPoint(a, b)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RoundedDemandSpace)
                and self.re_max == other.re_max and self.im_max == other.im_max)


def rounded_demand_space(grids: ProjectionGrids,
                         limits: Limits = DEFAULT_LIMITS) -> RoundedDemandSpace:
    """All grid points in the a_plus x b box."""
    size = grids.a_plus_size * grids.b_size
    if size > limits.max_table_cells:
        raise GridTooLarge(
            f"{size} grid points exceed the cap {limits.max_table_cells}")
    return RoundedDemandSpace(grids.a_plus_max, grids.b_max)
