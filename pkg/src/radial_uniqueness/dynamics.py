"""Energy bookkeeping and rigorous zero-crossing counts along trajectories.

Crossings are counted between *strictly signed* step-end boxes. The steps
between two such boxes form a span. A sign flip across a span means an odd
number of zeros inside it, and equal signs mean an even number. The count is
exact once each span is shown to hold at most one zero. That holds when y is
monotone over the span (the a-priori ``v`` boxes share one strict sign) or
when the span is too short for y to go out past a turning point and back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

from . import interval as iv
from .errors import AmbiguousSign
from .integrator import MAIN, System, TaylorStep, Trajectory
from .interval import Interval

_QUARTER = Interval(0.25)


def energy(y: Interval, v: Interval) -> Interval:
    """``v^2/2 + y^4/4 - y^2/2``, with the quartic part evaluated as ``(y^2 - 1)^2/4 - 1/4``."""
    y2 = iv.pow_int(y, 2)
    pot = iv.pow_int(y2 - 1, 2) * _QUARTER - _QUARTER
    natural = iv.pow_int(v, 2) * 0.5 + iv.pow_int(y, 4) * _QUARTER - y2 * 0.5
    e = iv.pow_int(v, 2) * 0.5 + pot
    return Interval._raw(max(e.lo, natural.lo), min(e.hi, natural.hi))


def energy_scaled(w: Interval, v: Interval, beta: Interval) -> Interval:
    """Energy ``v^2/2 + w^4/4 - beta^2 w^2/2`` of the rescaled equation."""
    return iv.pow_int(v, 2) * 0.5 + iv.pow_int(w, 4) * _QUARTER - iv.pow_int(beta, 2) * iv.pow_int(w, 2) * 0.5


def box_energy(lo, hi, system: System = MAIN) -> Interval:
    """Energy over a state box, intersected with its mean-value form about the midpoint."""
    y = Interval(float(lo[0]), float(hi[0]))
    v = Interval(float(lo[1]), float(hi[1]))
    if system.kind == "main":
        nat = energy(y, v)
        ym, vm = Interval(y.mid), Interval(v.mid)
        mv = energy(ym, vm) + (iv.pow_int(y, 3) - y) * (y - ym) + v * (v - vm)
    else:
        beta = Interval(float(lo[2]), float(hi[2]))
        nat = energy_scaled(y, v, beta)
        ym, vm = Interval(y.mid), Interval(v.mid)
        b2 = iv.pow_int(beta, 2)
        # beta enters with a nonpositive partial (for beta >= 0), handled by the natural range
        mv = (energy_scaled(ym, vm, beta)
              + (iv.pow_int(y, 3) - b2 * y) * (y - ym) + v * (v - vm))
    lo_, hi_ = max(nat.lo, mv.lo), min(nat.hi, mv.hi)
    if lo_ > hi_:
        # cannot happen for sound inputs; fall back to the natural extension
        return nat
    return Interval._raw(lo_, hi_)


def max_speed(E0: Interval, beta: Optional[Interval] = None) -> float:
    """Upper bound on ``|v|`` for all later times, given the energy enclosure ``E0``.

    Energy never increases and the potential is at least ``-1/4``
    (``-beta^4/4`` for the rescaled equation), so ``v^2 <= 2 E0 + 1/2``.
    """
    floor = Interval(0.5) if beta is None else iv.pow_int(beta, 4) * 0.5
    s = (E0 * 2 + floor).hi
    if not s > 0.0:
        return 0.0
    return iv.sqrt(Interval(s)).hi


def certify_no_double_cross(h: float, v_max: float, gap: float = 2.0) -> bool:
    """True when a step of length ``h`` at speed ``<= v_max`` cannot cross zero twice.

    Two zeros need a turning point between them, and a turning point with
    positive energy sits at ``|y| > sqrt(2)``. Covering ``2 sqrt(2)`` takes
    longer than covering ``gap = 2``.
    """
    if v_max <= 0.0:
        return True
    return (Interval(h) * Interval(v_max)).hi <= gap


def turning_gap(system: System, beta_lo: float = 0.0, e_lo: float = 0.0) -> float:
    """Distance a solution must travel between two zeros of its first component.

    For the rescaled equation a turning point with energy at least ``e_lo``
    has ``w^2 >= beta^2 + sqrt(beta^4 + 4 e_lo)``; the energy at any turning
    point is positive, which gives ``w^2 > 2 beta^2`` at worst.
    """
    if system.kind == "main":
        return 2.0
    b = Interval(max(beta_lo, 0.0))
    e = Interval(max(e_lo, 0.0))
    b2 = iv.pow_int(b, 2)
    # both radicands are nonnegative; clip rounding below zero
    inner = iv.sqrt(_nonneg(iv.pow_int(b2, 2) + e * 4))
    return max(0.0, (iv.sqrt(_nonneg(b2 + inner)) * 2).lo)


def _nonneg(a: Interval) -> Interval:
    return Interval._raw(max(a.lo, 0.0), max(a.hi, 0.0))


def _beta_of(lo, hi, system: System) -> Optional[Interval]:
    if system.kind == "main":
        return None
    return Interval(float(lo[2]), float(hi[2]))


def careful_step_cap(system: System = MAIN, factor: float = 1.0):
    """Step cap for ``integrate``: keeps ``h * v_max <= 2`` from the current box's energy."""

    def cap(lo, hi) -> float:
        vm = max_speed(box_energy(lo, hi, system), _beta_of(lo, hi, system))
        if vm <= 0.0:
            return math.inf
        return factor * (Interval(2.0) / Interval(vm)).lo

    return cap


@dataclass(frozen=True)
class CrossingCount:
    """Number of sign changes of the first component up to the trajectory end.

    ``count`` is always a rigorous lower bound; it is the true count when
    ``exact`` is set.
    """

    count: int
    exact: bool
    last_sign: int


@dataclass
class CrossingCounter:
    """Incremental crossing counter; feed it the steps of one trajectory in order."""

    system: System = MAIN
    start_sign: int = 1
    beta_lo: float = 0.0
    count: int = 0
    exact: bool = True
    last_sign: int = 0
    crossing_times: List[Interval] = field(default_factory=list)
    _span: List[TaylorStep] = field(default_factory=list)
    _span_start: float = 0.0
    _last_t: float = 0.0

    def __post_init__(self):
        if self.last_sign == 0:
            self.last_sign = self.start_sign
        if self.start_sign == 0:
            raise AmbiguousSign("starting box is not strictly signed")

    @property
    def pending(self) -> bool:
        """A span is open: the latest step-end box still straddles zero."""
        return bool(self._span) and Interval(float(self._span[-1].box_lo[0]),
                                             float(self._span[-1].box_hi[0])).sign() == 0

    def feed(self, st: TaylorStep) -> None:
        if not self._span:
            self._span_start = st.t0
        self._span.append(st)
        s = Interval(float(st.box_lo[0]), float(st.box_hi[0])).sign()
        if s == 0:
            return
        span = self._span
        self._span = []
        zero_possible = any(sp.apriori_lo[0] <= 0.0 <= sp.apriori_hi[0] for sp in span)
        if s != self.last_sign:
            self.count += 1
            self.crossing_times.append(Interval(self._span_start, st.t1))
            if not self._at_most_one(span, st):
                self.exact = False
        elif zero_possible and not self._at_most_one(span, st):
            # an even number of zeros, possibly two
            self.exact = False
        self.last_sign = s

    def _at_most_one(self, span: List[TaylorStep], end: TaylorStep) -> bool:
        # y is monotone over the span
        vs = [Interval(float(sp.apriori_lo[1]), float(sp.apriori_hi[1])).sign() for sp in span]
        if vs[0] != 0 and all(s == vs[0] for s in vs):
            return True
        # too short to reach a turning point and come back
        duration = Interval(end.t1) - Interval(span[0].t0)
        vmag = max(max(abs(float(sp.apriori_lo[1])), abs(float(sp.apriori_hi[1]))) for sp in span)
        e_end = box_energy(end.box_lo, end.box_hi, self.system)
        beta = _beta_of(span[0].apriori_lo, span[0].apriori_hi, self.system)
        # energy decay bounds the speed by the energy at the span start
        vmag = min(vmag, max_speed(self._energy_before(span), beta))
        gap = turning_gap(self.system, self.beta_lo, e_end.lo)
        return gap > 0.0 and (duration * Interval(vmag)).hi <= gap

    def _energy_before(self, span: List[TaylorStep]) -> Interval:
        # the a-priori box of the first step contains the state at its start
        st = span[0]
        return box_energy(st.apriori_lo, st.apriori_hi, self.system)

    def result(self, allow_pending: bool = False) -> CrossingCount:
        if self._span and not allow_pending:
            raise AmbiguousSign(f"sign of the first component is unresolved at t = {self._span[-1].t1}")
        exact = self.exact and not self._span
        return CrossingCount(self.count, exact, self.last_sign)


def _start_sign(traj: Trajectory) -> int:
    return Interval(float(traj.start_lo[0]), float(traj.start_hi[0])).sign()


def count_crossings(traj: Trajectory, allow_pending: bool = False) -> CrossingCount:
    """Rigorous crossing count of the first component over the whole trajectory.

    Raises ``AmbiguousSign`` when the trajectory ends inside an unresolved
    span, unless ``allow_pending`` (then the result is a lower bound with
    ``exact`` false).
    """
    beta_lo = float(traj.start_lo[2]) if traj.system.kind != "main" else 0.0
    c = CrossingCounter(traj.system, _start_sign(traj), beta_lo)
    for st in traj.steps:
        c.feed(st)
    return c.result(allow_pending)


def sign_changes_lower_bound(traj: Trajectory) -> int:
    """Sign alternations among strictly signed step-end boxes; a lower bound on the zeros."""
    return count_crossings(traj, allow_pending=True).count


def energy_profile(traj: Trajectory) -> List[Interval]:
    """Energy enclosure at the start and after every step."""
    out = [box_energy(traj.start_lo, traj.start_hi, traj.system)]
    for st in traj.steps:
        out.append(box_energy(st.box_lo, st.box_hi, traj.system))
    return out
