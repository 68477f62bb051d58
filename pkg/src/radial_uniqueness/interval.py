"""Closed real intervals with outward-rounded float endpoints.

Every operation computes its endpoints in round-to-nearest and then steps them
one ulp outward with ``math.nextafter``. Round-to-nearest is within half an ulp
for ``+ - * /`` and ``sqrt``, so the nudge is always enough. ``exp`` and ``log``
come from libm, which is not correctly rounded; those get two ulps.
"""
from __future__ import annotations

import math
import operator
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

from .errors import DivisionByZeroInterval, DomainError

Number = Union[int, float]
_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _float_enclosure(x) -> Tuple[float, float]:
    """Tightest float pair around an int/Fraction/float value."""
    if isinstance(x, float):
        return x, x
    f = float(x)
    if Fraction(f) == Fraction(x):
        return f, f
    if Fraction(f) < Fraction(x):
        return f, _up(f)
    return _dn(f), f


class Interval:
    """A closed interval ``[lo, hi]``.

    Arithmetic operators accept ints and floats on either side; ints that are
    not exactly representable are widened to the enclosing float pair.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Number, hi: Optional[Number] = None):
        if hi is None:
            lo, hi = _float_enclosure(lo)
        else:
            lo = _float_enclosure(lo)[0]
            hi = _float_enclosure(hi)[1]
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoint is NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo!r}, {hi!r}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, lo: float, hi: float) -> "Interval":
        obj = object.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    @classmethod
    def from_rational(cls, num: int, den: int = 1) -> "Interval":
        lo, hi = _float_enclosure(Fraction(num, den))
        return cls._raw(lo, hi)

    # -- basic properties -------------------------------------------------
    @property
    def width(self) -> float:
        return _up(self.hi - self.lo) if self.hi != self.lo else 0.0

    @property
    def mid(self) -> float:
        if math.isinf(self.lo) or math.isinf(self.hi):
            return 0.0 if self.lo == -self.hi else (self.lo if math.isinf(self.hi) else self.hi)
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def is_thin(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (int, float)):
            return self.lo <= x <= self.hi
        q = Fraction(x)
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    __contains__ = contains

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def interior_contains(self, other: "Interval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def sign(self) -> int:
        """+1 / -1 when the interval is strictly signed, 0 otherwise."""
        if self.lo > 0.0:
            return 1
        if self.hi < 0.0:
            return -1
        return 0

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, (int, float, Fraction)):
            lo, hi = _float_enclosure(x)
            return Interval._raw(lo, hi)
        return NotImplemented

    def __neg__(self) -> "Interval":
        return Interval._raw(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o is NotImplemented:
            return o
        return Interval._raw(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o is NotImplemented:
            return o
        return Interval._raw(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a == b == 0.0 or c == d == 0.0:
            return Interval._raw(0.0, 0.0)
        p = (a * c, a * d, b * c, b * d)
        lo, hi = min(p), max(p)
        if math.isnan(lo) or math.isnan(hi):
            # 0 * inf corner; the true product set is unbounded only on one side
            p = tuple(0.0 if math.isnan(v) else v for v in p)
            lo, hi = min(p), max(p)
        return Interval._raw(_dn(lo), _up(hi))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0.0 <= self.hi:
            raise DivisionByZeroInterval(f"division by interval {self!r} containing 0")
        return Interval._raw(_dn(1.0 / self.hi), _up(1.0 / self.lo))

    def __truediv__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o is NotImplemented:
            return o
        if o.lo <= 0.0 <= o.hi:
            raise DivisionByZeroInterval(f"division by interval {o!r} containing 0")
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        q = (a / c, a / d, b / c, b / d)
        return Interval._raw(_dn(min(q)), _up(max(q)))

    def __rtruediv__(self, other) -> "Interval":
        o = Interval._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int):
            return NotImplemented
        return pow_int(self, k)

    # -- comparisons are set relations, not orderings ---------------------
    def __eq__(self, other) -> bool:
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.lo == o.lo and self.hi == o.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo:.6g}, {self.hi:.6g}]"

    def __iter__(self):
        yield self.lo
        yield self.hi

    def to_hex(self) -> Tuple[str, str]:
        return (self.lo.hex(), self.hi.hex())

    @classmethod
    def from_hex(cls, pair: Iterable[str]) -> "Interval":
        lo, hi = pair
        return cls(float.fromhex(lo), float.fromhex(hi))


def as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval(x)


# -- elementary functions -----------------------------------------------------
def _pow_nonneg(x: float, k: int, rnd) -> float:
    # repeated squaring; every partial product is nonnegative so directed
    # rounding of each multiplication bounds the exact power
    result = 1.0
    base = x
    while k:
        if k & 1:
            result = rnd(result * base)
        k >>= 1
        if k:
            base = rnd(base * base)
    return result


def pow_int(a: Interval, k: int) -> Interval:
    """Range of ``x**k`` over ``a`` using parity and monotonicity."""
    if k < 0:
        return pow_int(a, -k).reciprocal()
    if k == 0:
        return Interval._raw(1.0, 1.0)
    if k == 1:
        return a
    lo, hi = a.lo, a.hi
    if k % 2 == 0:
        if lo >= 0.0:
            return Interval._raw(_pow_nonneg(lo, k, _dn), _pow_nonneg(hi, k, _up))
        if hi <= 0.0:
            return Interval._raw(_pow_nonneg(-hi, k, _dn), _pow_nonneg(-lo, k, _up))
        return Interval._raw(0.0, _pow_nonneg(max(-lo, hi), k, _up))
    new_lo = _pow_nonneg(lo, k, _dn) if lo >= 0.0 else -_pow_nonneg(-lo, k, _up)
    new_hi = _pow_nonneg(hi, k, _up) if hi >= 0.0 else -_pow_nonneg(-hi, k, _dn)
    return Interval._raw(new_lo, new_hi)


def sqrt(a: Interval) -> Interval:
    if a.lo < 0.0:
        raise DomainError(f"sqrt of {a!r} with negative lower endpoint")
    lo = max(0.0, _dn(math.sqrt(a.lo)))
    return Interval._raw(lo, _up(math.sqrt(a.hi)))


def log(a: Interval) -> Interval:
    if a.lo <= 0.0:
        raise DomainError(f"log of {a!r} with nonpositive lower endpoint")
    return Interval._raw(_dn(_dn(math.log(a.lo))), _up(_up(math.log(a.hi))))


ln = log


def exp(a: Interval) -> Interval:
    lo = 0.0 if a.lo == -_INF else max(0.0, _dn(_dn(math.exp(a.lo))))
    try:
        hi = _up(_up(math.exp(a.hi)))
    except OverflowError:
        hi = _INF
    return Interval._raw(lo, hi)


# -- set operations -----------------------------------------------------------
def hull(a: Interval, *others: Interval) -> Interval:
    lo, hi = a.lo, a.hi
    for o in others:
        lo = min(lo, o.lo)
        hi = max(hi, o.hi)
    return Interval._raw(lo, hi)


def intersect(a: Interval, b: Interval) -> Optional[Interval]:
    """Intersection, or ``None`` when the intervals are disjoint."""
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        return None
    return Interval._raw(lo, hi)


def strictly_lt(a: Interval, b: Interval) -> bool:
    return a.hi < b.lo


def contains(a: Interval, x) -> bool:
    return a.contains(x)


def width(a: Interval) -> float:
    return a.width


def mid(a: Interval) -> float:
    return a.mid


def bisect(a: Interval) -> Tuple[Interval, Interval]:
    """Split at the midpoint; the halves share the midpoint."""
    m = a.mid
    return Interval._raw(a.lo, m), Interval._raw(m, a.hi)


_ARITH = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def arith(op: str, a: Interval, b: Optional[Interval] = None) -> Interval:
    """Dispatch form of the arithmetic operators (``neg`` ignores ``b``)."""
    if op == "neg":
        return -a
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown interval operation {op!r}") from None
    return fn(a, b)


def elem(fn: str, a: Interval, k: Optional[int] = None) -> Interval:
    if fn == "sqrt":
        return sqrt(a)
    if fn in ("ln", "log"):
        return log(a)
    if fn == "exp":
        return exp(a)
    if fn == "pow_int":
        if k is None:
            raise ValueError("pow_int needs an exponent")
        return pow_int(a, k)
    raise ValueError(f"unknown elementary function {fn!r}")


SQRT2 = sqrt(Interval(2.0))
SQRT3 = sqrt(Interval(3.0))
INV_SQRT3 = SQRT3.reciprocal()
LOG4 = log(Interval(4.0))
