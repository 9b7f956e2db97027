"""Shared strategies and helpers for the test suite."""

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ckpsolve import cx

settings.register_profile(
    "ci", max_examples=80, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@st.composite
def rationals(draw, min_num=-12, max_num=12, denoms=(1, 2, 3, 4, 6, 8)):
    num = draw(st.integers(min_num, max_num))
    den = draw(st.sampled_from(denoms))
    return Fraction(num, den)


@st.composite
def upper_half_demands(draw):
    """Demands with nonnegative imaginary part, either quadrant."""
    re = draw(rationals())
    im = draw(rationals(min_num=0))
    return cx(re, im)


@st.composite
def first_quadrant_demands(draw):
    re = draw(rationals(min_num=0))
    im = draw(rationals(min_num=0))
    return cx(re, im)


def product_closure_oracle(options, d):
    """Independent re-implementation of the closure: scan all options."""
    best = Fraction(0)
    for o, v in options:
        ok = True
        for fc, dc in ((o.re, d.re), (o.im, d.im)):
            if abs(dc) < abs(fc) or (fc != 0 and (fc > 0) != (dc > 0)):
                ok = False
                break
        if ok and v > best:
            best = v
    return best
