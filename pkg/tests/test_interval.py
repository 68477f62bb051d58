import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from radial_uniqueness import interval as iv
from radial_uniqueness.errors import DivisionByZeroInterval, DomainError
from radial_uniqueness.interval import Interval

from checks import fuzz_containment


def test_construction_rejects_empty_and_nan():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(math.nan, 1.0)


def tight(r: Interval, lo: float, hi: float, ulps: int = 2) -> bool:
    """``r`` encloses ``[lo, hi]`` and overshoots by at most a few ulp per side."""
    if not (r.lo <= lo and hi <= r.hi):
        return False
    a, b = lo, hi
    for _ in range(ulps):
        a, b = math.nextafter(a, -math.inf), math.nextafter(b, math.inf)
    return a <= r.lo and r.hi <= b


def test_add_exact():
    assert tight(iv.arith("add", Interval(1, 2), Interval(3, 4)), 4, 6)


def test_mul_sign_cases():
    assert tight(iv.arith("mul", Interval(-1, 2), Interval(3, 4)), -4, 8)
    assert tight(Interval(-2, -1) * Interval(-3, 5), -10, 6)


def test_div_third_has_width_and_contains():
    r = iv.arith("div", Interval(1), Interval(3))
    assert r.width > 0
    assert Fraction(r.lo) < Fraction(1, 3) < Fraction(r.hi)


def test_div_by_zero_interval():
    with pytest.raises(DivisionByZeroInterval):
        Interval(1) / Interval(-1, 1)


def test_neg():
    assert iv.arith("neg", Interval(1, 2)) == Interval(-2, -1)


def test_sqrt_perfect_squares():
    r = iv.sqrt(Interval(4, 9))
    assert r.contains(2) and r.contains(3)
    assert r.lo > 1.999999 and r.hi < 3.000001


def test_pow_int_even_straddling():
    r = iv.pow_int(Interval(-2, 1), 2)
    assert r.lo == 0.0 and tight(r, 0, 4)


def test_pow_int_odd_negative():
    # one directed rounding per multiplication
    assert tight(iv.pow_int(Interval(-2, -1), 3), -8, -1, ulps=4)


def test_ln_one():
    r = iv.log(Interval(1.0))
    assert r.contains(0.0)
    assert r.hi - r.lo <= 4 * 5e-324 or r.width <= 2 * math.ulp(0.0) * 2


def test_domain_errors():
    with pytest.raises(DomainError):
        iv.sqrt(Interval(-1, 1))
    with pytest.raises(DomainError):
        iv.log(Interval(0, 1))


def test_set_ops():
    assert iv.bisect(Interval(0, 2)) == (Interval(0, 1), Interval(1, 2))
    assert iv.strictly_lt(Interval(-2, -1), Interval(0, 3))
    assert not iv.strictly_lt(Interval(-2, 0), Interval(0, 3))
    assert iv.hull(Interval(1, 2), Interval(5, 6)) == Interval(1, 6)
    assert iv.intersect(Interval(1, 2), Interval(3, 4)) is None
    assert iv.intersect(Interval(1, 3), Interval(2, 4)) == Interval(2, 3)
    # width is an upper bound
    assert 2 <= Interval(1, 3).width <= math.nextafter(2, 3)
    assert Interval(1, 3).mid == 2


def test_constants_enclose():
    assert iv.SQRT2.lo < math.sqrt(2) < iv.SQRT2.hi or iv.SQRT2.contains(math.sqrt(2))
    assert Fraction(iv.SQRT2.lo) ** 2 < 2 < Fraction(iv.SQRT2.hi) ** 2
    assert Fraction(iv.INV_SQRT3.lo) ** 2 < Fraction(1, 3) < Fraction(iv.INV_SQRT3.hi) ** 2


def test_hex_roundtrip():
    a = Interval(0.1, 0.30000000000000004)
    assert Interval.from_hex(a.to_hex()) == a


def test_from_rational_encloses():
    r = Interval.from_rational(3, 8)
    assert r.lo == r.hi == 0.375
    t = Interval.from_rational(1, 10)
    assert Fraction(t.lo) < Fraction(1, 10) < Fraction(t.hi)


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def intervals(draw, elements=finite):
    a, b = draw(elements), draw(elements)
    return Interval(min(a, b), max(a, b))


@st.composite
def nested(draw):
    outer = draw(intervals())
    a = draw(st.floats(min_value=outer.lo, max_value=outer.hi))
    b = draw(st.floats(min_value=outer.lo, max_value=outer.hi))
    return Interval(min(a, b), max(a, b)), outer


@given(nested(), nested(), st.sampled_from(["add", "sub", "mul"]))
def test_inclusion_monotone(ab, cd, op):
    (a, a2), (b, b2) = ab, cd
    r, r2 = iv.arith(op, a, b), iv.arith(op, a2, b2)
    assert r2.lo <= r.lo and r.hi <= r2.hi


@given(intervals(), intervals())
def test_widths_nonnegative_and_at_least_exact(a, b):
    s = a + b
    assert s.width >= 0
    assert Fraction(s.hi) - Fraction(s.lo) >= Fraction(a.hi) - Fraction(a.lo) + Fraction(b.hi) - Fraction(b.lo)


@given(intervals(), st.integers(min_value=0, max_value=7), st.floats(0, 1))
def test_pow_int_contains_points(a, k, u):
    x = a.lo + u * (a.hi - a.lo)
    x = min(max(x, a.lo), a.hi)
    r = iv.pow_int(a, k)
    assert Fraction(r.lo) <= Fraction(x) ** k <= Fraction(r.hi)


def test_containment_fuzz_small():
    bad, done = fuzz_containment(20_000, seed=7)
    assert bad == 0 and done >= 20_000


def test_intersects():
    a = Interval(1.0, 2.0)
    assert a.intersects(Interval(2.0, 3.0)) and a.intersects(Interval(1.5))
    assert not a.intersects(Interval(2.0000001, 3.0))
    assert not Interval(-1.0, 0.5).intersects(a)
