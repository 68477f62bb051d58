"""Rigorous start enclosures at a small positive time.

The radial equation is singular at ``t = 0``. Near zero the solution is
bracketed by the second Picard iterate from below and by the iterate plus an
explicit one-sided quartic/cubic error term from above. The rescaled equation
``w'' + (2/s) w' + w^3 - beta^2 w = 0`` has the analogous bracket.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from . import interval as iv
from .errors import BetaRangeError, DomainError, TStarViolation
from .interval import Interval

ONE_TENTH = Interval.from_rational(1, 10)


def f(y: Interval) -> Interval:
    """Nonlinearity ``y^3 - y``."""
    return iv.pow_int(y, 3) - y


def fprime(y: Interval) -> Interval:
    return 3 * iv.pow_int(y, 2) - 1


@dataclass(frozen=True)
class StateEnclosure:
    """Box for ``(y, y', delta, delta')`` valid for every seed ``b`` and every time in ``t``."""

    y: Interval
    v_y: Interval
    delta: Interval
    v_delta: Interval
    t: Interval

    @property
    def components(self) -> Tuple[Interval, Interval, Interval, Interval]:
        return (self.y, self.v_y, self.delta, self.v_delta)

    def to_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        comps = self.components
        return (np.array([c.lo for c in comps]), np.array([c.hi for c in comps]))

    @classmethod
    def from_arrays(cls, lo: Sequence[float], hi: Sequence[float], t: Interval) -> "StateEnclosure":
        comps = [Interval(float(a), float(b)) for a, b in zip(lo, hi)]
        return cls(*comps, t=t)

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(c.contains(float(p)) for c, p in zip(self.components, point))


@dataclass(frozen=True)
class ScaledStateEnclosure:
    """Box for ``(w, w')`` of the rescaled equation, for every ``beta`` in ``beta``."""

    w: Interval
    v_w: Interval
    beta: Interval
    t: Interval

    @property
    def components(self) -> Tuple[Interval, Interval, Interval]:
        return (self.w, self.v_w, self.beta)

    def to_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        comps = self.components
        return (np.array([c.lo for c in comps]), np.array([c.hi for c in comps]))

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(c.contains(float(p)) for c, p in zip((self.w, self.v_w), point))


def _monotone_range(fn: Callable, partials: Sequence[Callable], args: Sequence[Interval]) -> Interval:
    """Range of ``fn`` over a box, tightened by corner evaluation.

    For each argument whose partial derivative has a certain sign over the
    whole box, the extremes sit on the matching endpoint; the remaining
    arguments stay as intervals. The natural extension is intersected in.
    """
    natural = fn(*args)
    lo_args, hi_args = [], []
    for a, dfn in zip(args, partials):
        s = 0
        if dfn is not None and not a.is_thin():
            d = dfn(*args)
            s = 1 if d.lo >= 0.0 else (-1 if d.hi <= 0.0 else 0)
        if s > 0:
            lo_args.append(Interval(a.lo))
            hi_args.append(Interval(a.hi))
        elif s < 0:
            lo_args.append(Interval(a.hi))
            hi_args.append(Interval(a.lo))
        else:
            lo_args.append(a)
            hi_args.append(a)
    lo = fn(*lo_args).lo
    hi = fn(*hi_args).hi
    return Interval(max(lo, natural.lo), min(hi, natural.hi))


def _check_b(b: Interval) -> None:
    if b.lo < iv.SQRT2.lo:
        raise DomainError(f"seed interval {b} starts below sqrt(2)")


def t_star(b: Interval) -> Interval:
    """Rigorous enclosure of the time up to which the delta bounds hold."""
    _check_b(b)
    rb = iv.SQRT3 * b
    branch1 = iv.sqrt(6 * (rb - 1) / (rb * (iv.pow_int(b, 2) - 1)))
    branch2 = iv.LOG4 / rb
    return Interval(min(branch1.lo, branch2.lo), min(branch1.hi, branch2.hi))


def admissible_t0(b: Interval, t0: Interval, scale: float | None = None) -> Interval:
    """Shrink ``t0`` (keeping its relative window) until it fits under ``t_star``.

    With ``scale`` given, ``t0.hi * b.hi <= scale`` is enforced as well; this
    keeps the quartic error terms small for large ``b``.
    """
    cap = 0.999 * t_star(b).lo
    if scale is not None:
        cap = min(cap, scale / b.hi)
    if t0.hi <= cap:
        return t0
    ratio = cap / t0.hi
    return Interval(t0.lo * ratio, t0.hi * ratio)


def _z2_y(b, t):
    return b - iv.pow_int(t, 2) * f(b) / 6


def _z2_y_db(b, t):
    return 1 - iv.pow_int(t, 2) * fprime(b) / 6


def _z2_v(b, t):
    return -(t * f(b)) / 3


def _z2_v_db(b, t):
    return -(t * fprime(b)) / 3


def _z2_d(b, t):
    return 1 - iv.pow_int(t, 2) * fprime(b) / 6


def _z2_d_db(b, t):
    return -(iv.pow_int(t, 2) * b)


def _z2_vd(b, t):
    return -(t * fprime(b)) / 3


def _z2_vd_db(b, t):
    return -(2 * t * b)


def _z2_vd_dt(b, t):
    return -fprime(b) / 3


def picard_z2(b: Interval, t: Interval) -> StateEnclosure:
    """Second Picard iterate ``(b - t^2 f/6, -t f/3, 1 - t^2 f'/6, -t f'/3)`` over ``b x t``."""
    y = _monotone_range(_z2_y, [_z2_y_db, lambda b_, t_: -(t_ * f(b_)) / 3], [b, t])
    v = _monotone_range(_z2_v, [_z2_v_db, lambda b_, t_: -f(b_) / 3], [b, t])
    d = _monotone_range(_z2_d, [_z2_d_db, lambda b_, t_: -(t_ * fprime(b_)) / 3], [b, t])
    vd = _monotone_range(_z2_vd, [_z2_vd_db, _z2_vd_dt], [b, t])
    return StateEnclosure(y, v, d, vd, t)


def initial_enclosure_main(b: Interval, t0: Interval) -> StateEnclosure:
    """Box containing ``(y, y', delta, delta')(tau)`` for all ``b`` in ``b``, ``tau`` in ``t0``.

    Valid for the part of ``b`` at or above sqrt(2). Lower endpoints are the
    Picard iterate; upper endpoints add the one-sided error terms evaluated at
    ``b.hi`` and ``t0.hi`` (all four are increasing in both).
    """
    _check_b(b)
    if t0.lo < 0.0:
        raise DomainError("start time must be nonnegative")
    ts = t_star(b)
    if t0.hi > ts.lo:
        raise TStarViolation(f"t0.hi = {t0.hi!r} exceeds the t* lower bound {ts.lo!r} for b = {b}")
    z2 = picard_z2(b, t0)
    bh = Interval(b.hi)
    th = Interval(t0.hi)
    ff = f(bh) * fprime(bh)
    b4 = iv.pow_int(bh, 4)
    t3 = iv.pow_int(th, 3)
    t4 = iv.pow_int(th, 4)
    ey = (ff * t4 / 120).hi
    ev = (ff * t3 / 30).hi
    ed = (b4 * t4 / 8).hi
    evd = (b4 * t3 / 2).hi
    return StateEnclosure(
        Interval(z2.y.lo, (z2.y + Interval(0.0, ey)).hi),
        Interval(z2.v_y.lo, (z2.v_y + Interval(0.0, ev)).hi),
        Interval(z2.delta.lo, (z2.delta + Interval(0.0, ed)).hi),
        Interval(z2.v_delta.lo, (z2.v_delta + Interval(0.0, evd)).hi),
        t0,
    )


def _check_beta(beta: Interval) -> None:
    if beta.lo < 0.0:
        raise BetaRangeError(f"beta interval {beta} has a negative endpoint")
    if beta.hi > ONE_TENTH.lo:
        raise BetaRangeError(f"beta interval {beta} exceeds 1/10")


def _wt(beta, t):
    return 1 - (1 - iv.pow_int(beta, 2)) * iv.pow_int(t, 2) / 6


def _vwt(beta, t):
    return -((1 - iv.pow_int(beta, 2)) * t) / 3


def initial_enclosure_scaled(beta: Interval, t0: Interval) -> ScaledStateEnclosure:
    """Box for ``(w, w')`` at times ``t0``, for ``0 <= beta <= 1/10``."""
    _check_beta(beta)
    if t0.lo < 0.0:
        raise DomainError("start time must be nonnegative")
    w = _monotone_range(_wt, [lambda b_, t_: b_ * iv.pow_int(t_, 2) / 3,
                              lambda b_, t_: -((1 - iv.pow_int(b_, 2)) * t_) / 3], [beta, t0])
    vw = _monotone_range(_vwt, [lambda b_, t_: 2 * b_ * t_ / 3,
                                lambda b_, t_: -(1 - iv.pow_int(b_, 2)) / 3], [beta, t0])
    th = Interval(t0.hi)
    ew = (iv.pow_int(th, 4) / 40).hi
    ev = (iv.pow_int(th, 3) / 10).hi
    return ScaledStateEnclosure(
        Interval(w.lo, (w + Interval(0.0, ew)).hi),
        Interval(vw.lo, (vw + Interval(0.0, ev)).hi),
        beta,
        t0,
    )
