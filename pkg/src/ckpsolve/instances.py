"""Instance generation and JSON serialization.

Two families: a reproducible random family (seeded, lattice-quantized
demands so rounding windows never straddle a declared coordinate), and the
subset-sum construction whose optimum certifies the hardness dichotomy:
it is at least 1 exactly when the underlying subset-sum question is
feasible, and below alpha otherwise.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import re as _re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

from .errors import InvalidParams, ParseError
from .limits import DEFAULT_LIMITS, Limits
from .model import (ComplexRational, Instance, MultiMindedBid,
                    SingleMindedBid, as_multi, cx, frac)

# ---------------------------------------------------------------------------
# subset-sum reduction


@dataclass(frozen=True)
class SubSumSpec:
    """A subset-sum question dressed up for the reduction.

    elements: the positive integers; target: the required sum; cot_theta:
    exact cotangent of the lone off-axis demand's angle past the imaginary
    axis (kept rational so all arithmetic stays exact); alpha: the value
    gap certified by infeasible instances.
    """

    elements: tuple
    target: int
    cot_theta: Fraction
    alpha: Fraction

    def __init__(self, elements, target: int, cot_theta, alpha) -> None:
        elements = tuple(int(a) for a in elements)
        cot_theta = frac(cot_theta)
        alpha = frac(alpha)
        if not elements or any(a <= 0 for a in elements):
            raise InvalidParams("elements must be positive integers")
        if target <= 0:
            raise InvalidParams("target must be positive")
        if cot_theta <= 0:
            raise InvalidParams("cot(theta) must be positive")
        if not (0 < alpha < 1):
            raise InvalidParams("alpha must lie in (0, 1)")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "cot_theta", cot_theta)
        object.__setattr__(self, "alpha", alpha)


def gen_subsum_reduction(spec: SubSumSpec) -> Instance:
    """The single-minded instance certifying the dichotomy.

    m real-axis demands a_k with value alpha/(m+1) each, one second-quadrant
    demand (-B, B*cot) with value 1, capacity B*cot.  A subset summing to B
    cancels the real part exactly, so the optimum reaches at least 1; if no
    subset does, every allocation containing the big demand overshoots and
    the optimum stays below alpha.
    """
    m = len(spec.elements)
    B = spec.target
    C = B * spec.cot_theta
    v_small = spec.alpha / (m + 1)
    bids = [SingleMindedBid(v_small, cx(a, 0)) for a in spec.elements]
    bids.append(SingleMindedBid(Fraction(1), cx(-B, C)))
    P = max(Fraction(1), 1 / spec.cot_theta)
    return Instance(C, bids, P)


def subsum_manifest(spec: SubSumSpec) -> dict:
    """Provenance record emitted next to generated reduction instances."""
    return {
        "family": "subsum",
        "elements": list(spec.elements),
        "target": spec.target,
        "cot_theta": _fstr(spec.cot_theta),
        "alpha": _fstr(spec.alpha),
        "question": "does some subset of elements sum exactly to target",
        "certificate": "optimum >= 1 iff feasible; optimum < alpha otherwise",
    }


def subsum_beta_slack(spec: SubSumSpec, beta) -> Fraction:
    """The quantity B^2 cot^2(theta) (beta^2 - 1).

    While it stays below 1, an allocator allowed to overshoot capacity by
    beta still answers the subset-sum question exactly; experiment scripts
    probe the sensitivity threshold with this helper.
    """
    beta = frac(beta)
    B = spec.target
    return B * B * spec.cot_theta * spec.cot_theta * (beta * beta - 1)


# ---------------------------------------------------------------------------
# random family


def gen_random(n: int, option_count: int, quadrant_mix, seed: int,
               capacity=Fraction(1), power_factor=Fraction(2),
               denominator: Optional[int] = None,
               value_max: int = 50,
               limits: Limits = DEFAULT_LIMITS) -> Instance:
    """Reproducible random instance.

    Demand coordinates are multiples of capacity/denominator; the default
    denominator n*(P+1) keeps that lattice at least as coarse as any grid
    unit with eps <= 1, so no declared coordinate ever falls strictly
    inside another's rounding window.  quadrant_mix in [0, 1] is the
    fraction of second-quadrant bids.  Second-quadrant demands use at most
    half the declared power-factor bound, leaving the guess ranges slack.
    option_count == 1 yields single-minded bids.
    """
    if n < 1:
        raise InvalidParams("need at least one user")
    if option_count < 1:
        raise InvalidParams("need at least one option per bid")
    if option_count + 1 > limits.max_bid_options:
        raise InvalidParams("option count exceeds the bid cap")
    C = frac(capacity)
    P = frac(power_factor)
    if C <= 0 or P < 1:
        raise InvalidParams("capacity must be positive and power factor >= 1")
    mix = frac(quadrant_mix) if not isinstance(quadrant_mix, float) \
        else Fraction(quadrant_mix).limit_denominator(100)
    if not (0 <= mix <= 1):
        raise InvalidParams("quadrant_mix must lie in [0, 1]")
    if denominator is None:
        q = n * (P + 1)
        if q.denominator != 1:
            raise InvalidParams(
                "default lattice n*(P+1) is not an integer; pass denominator")
        q = int(q)
    else:
        q = int(denominator)
    if q < 2:
        raise InvalidParams("lattice denominator must be at least 2")

    rng = random.Random(seed)
    step = C / q
    minus_count = int(round(float(Fraction(n) * mix)))
    minus_ids = set(rng.sample(range(n), minus_count))
    value_denoms = (1, 2, 4, 5)

    def rand_value() -> Fraction:
        return Fraction(rng.randint(1, value_max), rng.choice(value_denoms))

    def plus_demand() -> ComplexRational:
        while True:
            a = rng.randint(0, q)
            b = rng.randint(0, isqrt(q * q - a * a))
            if a or b:
                return cx(a * step, b * step)

    def minus_demand() -> ComplexRational:
        while True:
            b = rng.randint(1, q)
            cap = math.floor(P * b / 2)
            if cap < 1:
                continue
            a = rng.randint(1, cap)
            return cx(-a * step, b * step)

    bids = []
    for uid in range(n):
        draw = minus_demand if uid in minus_ids else plus_demand
        seen = set()
        options = []
        attempts = 0
        while len(options) < option_count and attempts < 50 * option_count:
            attempts += 1
            d = draw()
            if (d.re, d.im) in seen:
                continue
            seen.add((d.re, d.im))
            options.append((d, rand_value()))
        if option_count == 1:
            bids.append(SingleMindedBid(options[0][1], options[0][0]))
        else:
            bids.append(MultiMindedBid(options))
    return Instance(C, bids, P)


# ---------------------------------------------------------------------------
# JSON schema

_FRAC_RE = _re.compile(r"^-?\d+/\d+$")


def _fstr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s, path: str) -> Fraction:
    if not isinstance(s, str) or not _FRAC_RE.match(s):
        raise ParseError(f"expected a rational string 'p/q', got {s!r}", path)
    num, den = s.split("/")
    if int(den) == 0:
        raise ParseError("zero denominator", path)
    return Fraction(int(num), int(den))


def instance_to_json_dict(inst: Instance) -> dict:
    bids = []
    for bid in inst.bids:
        opts = [{"re": _fstr(d.re), "im": _fstr(d.im), "value": _fstr(v)}
                for d, v in as_multi(bid).options]
        if isinstance(bid, SingleMindedBid):
            opts = [{"re": _fstr(bid.demand.re), "im": _fstr(bid.demand.im),
                     "value": _fstr(bid.value)}]
        bids.append({"options": opts})
    return {
        "capacity": _fstr(inst.capacity),
        "power_factor_bound": _fstr(inst.power_factor_bound),
        "bids": bids,
    }


def instance_from_json_dict(obj, path: str = "instance") -> Instance:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", path)
    expected = {"capacity", "power_factor_bound", "bids"}
    extra = set(obj) - expected
    if extra:
        raise ParseError(f"unknown fields {sorted(extra)}", path)
    missing = expected - set(obj)
    if missing:
        raise ParseError(f"missing fields {sorted(missing)}", path)
    C = _parse_frac(obj["capacity"], f"{path}.capacity")
    P = _parse_frac(obj["power_factor_bound"], f"{path}.power_factor_bound")
    if not isinstance(obj["bids"], list):
        raise ParseError("bids must be a list", f"{path}.bids")
    bids = []
    for i, b in enumerate(obj["bids"]):
        bpath = f"{path}.bids[{i}]"
        if not isinstance(b, dict) or set(b) != {"options"}:
            raise ParseError("bid must be an object with an 'options' field",
                             bpath)
        if not isinstance(b["options"], list) or not b["options"]:
            raise ParseError("options must be a nonempty list", bpath)
        options = []
        for j, o in enumerate(b["options"]):
            opath = f"{bpath}.options[{j}]"
            if not isinstance(o, dict) or set(o) != {"re", "im", "value"}:
                raise ParseError(
                    "option must be an object with re, im, value", opath)
            d = ComplexRational(_parse_frac(o["re"], f"{opath}.re"),
                                _parse_frac(o["im"], f"{opath}.im"))
            options.append((d, _parse_frac(o["value"], f"{opath}.value")))
        if len(options) == 1 and not options[0][0].is_zero:
            bids.append(SingleMindedBid(options[0][1], options[0][0]))
        else:
            bids.append(MultiMindedBid(options))
    return Instance(C, bids, P)


def write_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json_dict(inst), fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_instance(path) -> Instance:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", str(path))
    return instance_from_json_dict(obj, str(path))


def instance_hash(inst: Instance) -> str:
    payload = json.dumps(instance_to_json_dict(inst), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()
