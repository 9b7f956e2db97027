"""Core domain types for knapsack problems with complex-valued demands.

All arithmetic is exact: demands are pairs of rationals, valuations are
rationals, and every comparison in a solver path reduces to integer
arithmetic on numerators and denominators.  No floating point appears
anywhere in this module.

Demands live in the closed upper half plane (arguments in [0, pi]); inputs
whose natural frame is the first and fourth quadrant are expected to be
pre-rotated by 90 degrees by the caller.  A bid in the "minus" class has
all its nonzero demands with strictly negative real part, a "plus" bid has
them all with nonnegative real part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import InvalidParams, MixedQuadrantBid
from .limits import DEFAULT_LIMITS, Limits

Rational = Fraction

RationalLike = Union[int, str, Fraction]


def frac(x: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings, or Fractions to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InvalidParams(f"not a rational: {x!r}")


@dataclass(frozen=True)
class ComplexRational:
    """A demand as an exact pair of rationals (real, imaginary)."""

    re: Fraction
    im: Fraction

    def __add__(self, other: "ComplexRational") -> "ComplexRational":
        return ComplexRational(self.re + other.re, self.im + other.im)

    def mirror(self) -> "ComplexRational":
        """Reflect across the imaginary axis (negate the real part)."""
        return ComplexRational(-self.re, self.im)

    def magnitude_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __str__(self) -> str:
        return f"({self.re}, {self.im})"


ZERO_DEMAND = ComplexRational(Fraction(0), Fraction(0))


def cx(re: RationalLike, im: RationalLike) -> ComplexRational:
    return ComplexRational(frac(re), frac(im))


def partial_order_leq(f: ComplexRational, d: ComplexRational) -> bool:
    """Component-wise magnitude dominance with matching signs: f <= d.

    On each axis, |d| must be at least |f| and the signs must agree; a zero
    component of f places no sign constraint, so the zero demand is below
    every demand.
    """
    for fc, dc in ((f.re, d.re), (f.im, d.im)):
        if abs(dc) < abs(fc):
            return False
        if fc != 0 and (fc > 0) != (dc > 0):
            return False
    return True


@dataclass(frozen=True)
class SingleMindedBid:
    """A single declared demand with its declared value."""

    value: Fraction
    demand: ComplexRational

    def __post_init__(self):
        if self.value < 0:
            raise InvalidParams("bid values must be nonnegative")

    def as_multi(self) -> "MultiMindedBid":
        return MultiMindedBid(((self.demand, self.value),))


@dataclass(frozen=True)
class MultiMindedBid:
    """A set of alternative demands, each with a declared value.

    The zero demand with value 0 is always a member; it is inserted at the
    front if absent.  The valuation extends to arbitrary demands through
    ``closure_value``.
    """

    options: tuple  # of (ComplexRational, Fraction)

    def __init__(self, options: Iterable) -> None:
        opts = []
        has_zero = False
        for demand, value in options:
            value = frac(value)
            if value < 0:
                raise InvalidParams("bid values must be nonnegative")
            if demand.is_zero:
                if value != 0:
                    raise InvalidParams(
                        "the zero demand is worth 0 by convention")
                has_zero = True
            opts.append((demand, value))
        if not has_zero:
            opts.insert(0, (ZERO_DEMAND, Fraction(0)))
        object.__setattr__(self, "options", tuple(opts))

    def nonzero_options(self) -> list:
        return [(d, v) for d, v in self.options if not d.is_zero]

    def mirror(self) -> "MultiMindedBid":
        """The same bid with every demand reflected across the imaginary axis."""
        return MultiMindedBid(tuple((d.mirror(), v) for d, v in self.options))


Bid = Union[SingleMindedBid, MultiMindedBid]


def as_multi(bid: Bid) -> MultiMindedBid:
    return bid.as_multi() if isinstance(bid, SingleMindedBid) else bid


def closure_value(bid: Bid, d: ComplexRational) -> Fraction:
    """Largest declared value among the bid's options dominated by d.

    This is the canonical monotone extension of a declared valuation to all
    demands: receiving d is worth the best declared alternative that fits
    under d.  Always at least 0 because the zero option is a member.
    """
    mbid = as_multi(bid)
    best = Fraction(0)
    for o, v in mbid.options:
        if v > best and partial_order_leq(o, d):
            best = v
    return best


def bid_quadrant(bid: Bid) -> int:
    """+1 for a first-quadrant bid, -1 for second-quadrant.

    The zero option is ignored: a bid whose nonzero demands all have
    re >= 0 is first-quadrant, all re < 0 second-quadrant.  A bid with only
    the zero option counts as first-quadrant.
    """
    mbid = as_multi(bid)
    nonzero = mbid.nonzero_options()
    if not nonzero:
        return 1
    if all(d.re >= 0 for d, _ in nonzero):
        return 1
    if all(d.re < 0 for d, _ in nonzero):
        return -1
    raise MixedQuadrantBid("bid has demands in both quadrants")


@dataclass(frozen=True)
class Instance:
    """A validated allocation instance.

    capacity: bound C on the magnitude of the total allocated demand.
    bids: one bid per user; user ids are positions in this tuple.
    power_factor_bound: a-priori bound P >= 1 on |re|/im for every
        second-quadrant demand, independent of the declarations.
    rotated_convention: records that demands are given in the post-rotation
        frame (arguments in [0, pi], imaginary parts nonnegative).
    """

    capacity: Fraction
    bids: tuple
    power_factor_bound: Fraction
    rotated_convention: bool = True

    def __init__(self, capacity, bids, power_factor_bound,
                 rotated_convention: bool = True,
                 limits: Limits = DEFAULT_LIMITS) -> None:
        object.__setattr__(self, "capacity", frac(capacity))
        object.__setattr__(self, "bids", tuple(bids))
        object.__setattr__(self, "power_factor_bound", frac(power_factor_bound))
        object.__setattr__(self, "rotated_convention", rotated_convention)
        validate_instance(self, limits)

    @property
    def n(self) -> int:
        return len(self.bids)

    @property
    def is_single_minded(self) -> bool:
        return all(isinstance(b, SingleMindedBid) for b in self.bids)

    def multi_bids(self) -> list:
        return [as_multi(b) for b in self.bids]

    @property
    def tan_theta(self) -> Fraction:
        """Exact tangent of the widest angle past the imaginary axis.

        0 when every demand lies in the first quadrant; otherwise the
        maximum of |re|/im over second-quadrant demands.  Never computed
        through floating-point trigonometry.
        """
        t = Fraction(0)
        for bid in self.multi_bids():
            for d, _ in bid.options:
                if d.re < 0:
                    t = max(t, Fraction(-d.re, 1) / d.im)
        return t


def validate_instance(inst: Instance, limits: Limits = DEFAULT_LIMITS) -> None:
    """Check every structural invariant; raise a typed error on violation.

    Per-demand rules: im >= 0 always, im <= C always.  First-quadrant
    demands satisfy re <= C * (1 + P); second-quadrant demands satisfy
    |re| <= P * im (the power-factor rule, checked by exact cross
    multiplication).  A demand's magnitude may exceed C: cancellation
    between the quadrants can still make it allocatable, and these per-axis
    bounds are exactly what keeps every demand on the projection grids.
    """
    C = inst.capacity
    P = inst.power_factor_bound
    if C <= 0:
        raise InvalidParams("capacity must be positive")
    if P < 1:
        raise InvalidParams("power factor bound must be at least 1")
    for uid, bid in enumerate(inst.bids):
        mbid = as_multi(bid)
        if len(mbid.options) > limits.max_bid_options:
            raise InvalidParams(
                f"bid {uid}: {len(mbid.options)} options exceed the cap "
                f"{limits.max_bid_options}")
        bid_quadrant(bid)  # raises MixedQuadrantBid
        for d, v in mbid.options:
            if v < 0:
                raise InvalidParams(f"bid {uid}: negative value")
            if d.im < 0:
                raise InvalidParams(
                    f"bid {uid}: demand {d} below the real axis; "
                    "rotate inputs by 90 degrees first")
            if d.im > C:
                raise InvalidParams(
                    f"bid {uid}: demand {d} has imaginary part above "
                    f"capacity {C}")
            if d.re >= 0:
                if d.re > C * (1 + P):
                    raise InvalidParams(
                        f"bid {uid}: demand {d} has real part above "
                        f"capacity * (1 + P)")
            else:
                if -d.re > P * d.im:
                    raise InvalidParams(
                        f"bid {uid}: demand {d} violates the power-factor "
                        f"bound {P}")


def quadrant_partition(inst: Instance) -> tuple:
    """Split user ids into (first-quadrant set, second-quadrant set)."""
    plus, minus = set(), set()
    for uid, bid in enumerate(inst.bids):
        if bid_quadrant(bid) >= 0:
            plus.add(uid)
        else:
            minus.add(uid)
    return frozenset(plus), frozenset(minus)


@dataclass(frozen=True)
class Allocation:
    """Per-user chosen demands with their exact total load and value."""

    chosen: tuple  # of ComplexRational, one per user
    total_load: ComplexRational
    total_value: Fraction


def build_allocation(bids: Sequence[Bid], chosen: Sequence[ComplexRational]) -> Allocation:
    """Assemble an allocation, computing the load and closure-value totals."""
    if len(bids) != len(chosen):
        raise InvalidParams("one chosen demand per user required")
    load = ZERO_DEMAND
    value = Fraction(0)
    for bid, d in zip(bids, chosen):
        load = load + d
        value += closure_value(bid, d)
    return Allocation(tuple(chosen), load, value)


def empty_allocation(n: int) -> Allocation:
    return Allocation(tuple(ZERO_DEMAND for _ in range(n)), ZERO_DEMAND, Fraction(0))


def load_and_check(alloc: Allocation, capacity: Fraction, beta: Fraction) -> bool:
    """Exact test of |total load| <= beta * capacity.

    Compared as (sum re)^2 + (sum im)^2 <= beta^2 C^2, entirely in rational
    arithmetic, so the result is invariant under common rescaling of all
    inputs.
    """
    beta = frac(beta)
    if beta < 1:
        raise InvalidParams("beta must be at least 1")
    lhs = alloc.total_load.magnitude_sq()
    bc = beta * frac(capacity)
    return lhs <= bc * bc
