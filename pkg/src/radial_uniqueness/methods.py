"""The three proof methods: FALL, BOUNDSTATEGOOD and INFTYCROSSESMANY.

Each takes an interval of seeds (``b`` or ``beta = 1/b``) and returns a
``MethodResult``. Failures are values, not exceptions; ``raise_for_status``
converts them into ``DepthExceeded`` / ``ConditionsNotMet`` when wanted.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from . import interval as iv
from .desingularize import (
    _check_beta,
    admissible_t0,
    initial_enclosure_main,
    initial_enclosure_scaled,
)
from .dynamics import (
    CrossingCounter,
    box_energy,
    careful_step_cap,
)
from .errors import (
    AmbiguousSign,
    ConditionsNotMet,
    DepthExceeded,
    MaxStepsExceeded,
    StepFailure,
    TStarViolation,
)
from .integrator import (
    MAIN,
    SCALED,
    Y_ONLY,
    EnclosureRepresentation,
    IntegratorConfig,
    StopCondition,
    integrate,
)
from .interval import Interval

FALL = "FALL"
BOUNDSTATEGOOD = "BOUNDSTATEGOOD"
INFTYCROSSESMANY = "INFTYCROSSESMANY"

_HALF = Interval(0.5)
_THREE_EIGHTHS = Interval.from_rational(3, 8)


@dataclass
class ProverConfig:
    integrator: IntegratorConfig = field(default_factory=lambda: IntegratorConfig(wrapping="hybrid"))
    t0: Tuple[float, float] = (0.1, 0.101)
    # t0 is scaled down so that t0.hi * b.hi stays below this
    t0_scale: float = 0.05
    max_depth: int = 60
    fall_t_max: float = 200.0
    bsg_t_max: float = 50.0
    bsg_pieces: Tuple[int, ...] = (4, 8, 16, 32, 64)
    # smaller t0 scales tried by BOUNDSTATEGOOD once every piece count fails;
    # the Picard error at t0 grows with b and sinks the large states. Such
    # tiny t0 also needs steps below the usual h_min, hence the second field
    bsg_t0_fallback: Tuple[float, ...] = (0.02, 0.01, 0.005, 0.002)
    fallback_h_min: float = 1e-10
    # None: max(600, 60 (n+1)^2), enough room for n + 1 zeros near beta = 0
    infty_t_max: Optional[float] = None

    def fingerprint(self) -> dict:
        ic = self.integrator
        return {
            "taylor_order": ic.order,
            "tol": ic.tol,
            "h_min": ic.h_min,
            "h_max": ic.h_max,
            "backoff": ic.backoff,
            "wrapping": ic.wrapping,
            "cond_max": ic.cond_max,
            "max_width": ic.max_width,
            "t0": list(self.t0),
            "t0_scale": self.t0_scale,
            "max_depth": self.max_depth,
            "fall_t_max": self.fall_t_max,
            "bsg_t_max": self.bsg_t_max,
            "bsg_pieces": list(self.bsg_pieces),
            "bsg_t0_fallback": list(self.bsg_t0_fallback),
            "fallback_h_min": self.fallback_h_min,
            "infty_t_max": self.infty_t_max,
        }


@dataclass(frozen=True)
class Proved:
    def __str__(self) -> str:
        return "Proved"


@dataclass(frozen=True)
class Failed:
    reason: str

    def __str__(self) -> str:
        return f"Failed({self.reason})"


Status = Union[Proved, Failed]


@dataclass
class Leaf:
    """One integrated piece of a method's interval."""

    interval: Interval
    ok: bool
    T: Optional[float] = None
    crossings: Optional[int] = None
    box_lo: Optional[np.ndarray] = None
    box_hi: Optional[np.ndarray] = None
    note: str = ""


@dataclass
class Witness:
    T: Optional[Interval] = None
    y: Optional[Interval] = None
    vy: Optional[Interval] = None
    delta: Optional[Interval] = None
    vdelta: Optional[Interval] = None
    crossings: Optional[int] = None
    subdivisions: int = 0
    leaves: List[Leaf] = field(default_factory=list)


@dataclass
class MethodResult:
    interval: Interval
    method: str
    status: Status
    witness: Witness = field(default_factory=Witness)
    n: Optional[int] = None
    seconds: float = 0.0

    @property
    def proved(self) -> bool:
        return isinstance(self.status, Proved)

    def raise_for_status(self) -> "MethodResult":
        if self.proved:
            return self
        if self.method == BOUNDSTATEGOOD:
            raise ConditionsNotMet(f"{self.method} on {self.interval}: {self.status.reason}")
        raise DepthExceeded(f"{self.method} on {self.interval}: {self.status.reason}")


# -- helpers ------------------------------------------------------------------
def _seed_main(b: Interval, cfg: ProverConfig):
    t0 = admissible_t0(b, Interval(*cfg.t0), scale=cfg.t0_scale)
    return initial_enclosure_main(b, t0)


def _hull_boxes(boxes):
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return lo, hi


def _comp(lo, hi, i) -> Interval:
    return Interval(float(lo[i]), float(hi[i]))


def _bisect_leaves(root: Interval, attempt, max_depth: int):
    """Depth-first bisection; ``attempt(piece)`` returns a Leaf.

    Returns ``(leaves, ok)``; leaves tile ``root`` in increasing order.
    """
    leaves: List[Leaf] = []
    stack = [(root, 0)]
    while stack:
        piece, depth = stack.pop()
        leaf = attempt(piece)
        if leaf.ok:
            leaves.append(leaf)
            continue
        if depth >= max_depth or piece.mid in (piece.lo, piece.hi):
            leaves.append(leaf)
            return leaves, False
        left, right = iv.bisect(piece)
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    return leaves, True


# -- FALL ---------------------------------------------------------------------
def _fall_leaf(b: Interval, cfg: ProverConfig) -> Leaf:
    if b.hi < iv.SQRT2.lo:
        # V(b) <= 0 there: energy is negative for every t > 0 and y never reaches 0
        return Leaf(b, True, 0.0, 0, note="below sqrt(2)")
    seed_b = Interval(max(b.lo, iv.SQRT2.lo), b.hi)
    try:
        seed = _seed_main(seed_b, cfg)
    except TStarViolation as exc:
        return Leaf(b, False, note=str(exc))
    # delta is not needed here, and near a bound state it grows fast enough to
    # spoil the y enclosure through the coordinate transform
    rep = EnclosureRepresentation.from_box([seed.y.lo, seed.v_y.lo, 1.0], [seed.y.hi, seed.v_y.hi, 1.0])
    counter = CrossingCounter(Y_ONLY, 1, 1.0)

    def done(traj) -> bool:
        st = traj.steps[-1]
        counter.feed(st)
        return box_energy(st.box_lo, st.box_hi, Y_ONLY).hi < 0.0

    try:
        traj = integrate(rep, seed.t, StopCondition(predicate=done, t_max=cfg.fall_t_max),
                         Y_ONLY, cfg.integrator, careful_step_cap(Y_ONLY))
    except (StepFailure, MaxStepsExceeded) as exc:
        return Leaf(b, False, note=f"integration: {exc}")
    if traj.stop_reason != "predicate":
        return Leaf(b, False, traj.t_end, note="negative energy not reached")
    try:
        cc = counter.result()
    except AmbiguousSign as exc:
        return Leaf(b, False, traj.t_end, note=str(exc))
    lo, hi = traj.final_box()
    if not cc.exact:
        return Leaf(b, False, traj.t_end, cc.count, lo, hi, note="crossing count not exact")
    return Leaf(b, True, traj.t_end, cc.count, lo, hi)


def fall(b: Interval, depth: Optional[int] = None, config: Optional[ProverConfig] = None) -> MethodResult:
    """Show every solution with seed in ``b`` reaches negative energy.

    The part of ``b`` below sqrt(2) needs no integration. Pieces that fail
    are bisected up to ``depth`` times.
    """
    cfg = config or ProverConfig()
    depth = cfg.max_depth if depth is None else depth
    start = time.perf_counter()
    leaves, ok = _bisect_leaves(b, lambda piece: _fall_leaf(piece, cfg), depth)
    w = Witness(subdivisions=len(leaves) - 1, leaves=leaves)
    ts = [lf.T for lf in leaves if lf.ok and lf.T is not None]
    if ts:
        w.T = Interval(max(ts))
    counts = [lf.crossings for lf in leaves if lf.ok and lf.crossings is not None]
    if counts:
        w.crossings = max(counts)
    boxes = [(lf.box_lo, lf.box_hi) for lf in leaves if lf.ok and lf.box_lo is not None]
    if boxes:
        lo, hi = _hull_boxes(boxes)
        w.y, w.vy = _comp(lo, hi, 0), _comp(lo, hi, 1)
    status: Status = Proved() if ok else Failed(
        f"DepthExceeded near {leaves[-1].interval}: {leaves[-1].note}")
    return MethodResult(b, FALL, status, w, seconds=time.perf_counter() - start)


# -- BOUNDSTATEGOOD -----------------------------------------------------------
def check_trap(y: Interval, v: Interval, E: Interval, T: Interval) -> bool:
    """Trapping test: ``0 <= y < 1/2``, ``v < 0``, ``0 < E < 1/4`` and ``E (T - 2 ln E + 3/2) < 3/8``.

    The last expression increases in ``E`` (for ``E < 1/4``) and in ``T``, so
    its supremum sits at ``(E.hi, T.hi)``.
    """
    if not (y.lo >= 0.0 and y.hi < _HALF.lo):
        return False
    if not v.hi < 0.0:
        return False
    if not (E.lo > 0.0 and E.hi < 0.25):
        return False
    e = Interval(E.hi)
    g = e * (Interval(T.hi) - 2 * iv.log(e) + 1.5)
    return g.hi < _THREE_EIGHTHS.lo


def _normalized(lo, hi, n: int) -> Tuple[Interval, Interval, Interval, Interval]:
    comps = [_comp(lo, hi, i) for i in range(4)]
    if n % 2:
        comps = [-c for c in comps]
    return tuple(comps)


def bsg_conditions(lo, hi, T: Interval, n: int, count, exact: bool) -> Tuple[bool, str]:
    """All BOUNDSTATEGOOD conditions at time ``T`` for one state box."""
    if count != n or not exact:
        return False, f"crossing count {count}{'' if exact else ' (inexact)'} != {n}"
    y, v, d, vd = _normalized(lo, hi, n)
    if not y.lo > 0.0:
        return False, "y not strictly signed"
    if not y.hi <= iv.INV_SQRT3.lo:
        return False, "y exceeds 1/sqrt(3)"
    if not (v.hi < 0.0 and d.hi < 0.0 and vd.hi < 0.0):
        return False, "v, delta, delta' not all opposite to y"
    E = box_energy(*((lo, hi) if n % 2 == 0 else (-hi, -lo)), MAIN)
    if not check_trap(y, v, E, T):
        return False, "trap condition fails"
    return True, ""


class _Piece:
    """One sub-interval of a BOUNDSTATEGOOD seed, advanced on demand."""

    def __init__(self, b: Interval, cfg: ProverConfig):
        seed = _seed_main(b, cfg)
        self.b = b
        self.cfg = cfg
        self.t = seed.t.lo
        lo, hi = seed.to_arrays()
        self.rep = EnclosureRepresentation.from_box(lo, hi)
        self.lo, self.hi = lo, hi
        self.counter = CrossingCounter(MAIN, 1)

    def advance(self, stop: StopCondition):
        def pred(traj) -> bool:
            st = traj.steps[-1]
            self.counter.feed(st)
            self.lo, self.hi = st.box_lo, st.box_hi
            return stop.predicate is not None and stop.predicate(self)

        if stop.t_end is not None and stop.t_end <= self.t:
            return "time"
        traj = integrate(self.rep, Interval(self.t),
                         StopCondition(t_end=stop.t_end, predicate=pred, t_max=stop.t_max),
                         MAIN, self.cfg.integrator, careful_step_cap(MAIN))
        self.rep = traj.rep
        self.t = traj.t_end
        return traj.stop_reason

    def conditions(self, n: int) -> Tuple[bool, str]:
        if self.counter.pending:
            return False, "sign unresolved"
        cc = self.counter.result()
        return bsg_conditions(self.lo, self.hi, Interval(self.t), n, cc.count, cc.exact)


def _bsg_try(b: Interval, n: int, k: int, cfg: ProverConfig) -> Tuple[bool, str, Optional[Witness]]:
    edges = [b.lo] + [b.lo + (b.hi - b.lo) * i / k for i in range(1, k)] + [b.hi]
    pieces = [_Piece(Interval(edges[i], edges[i + 1]), cfg) for i in range(k)]
    scout = pieces[k // 2]
    others = [p for p in pieces if p is not scout]

    def scout_ready(p: _Piece) -> bool:
        if p.counter.count > n and p.counter.exact:
            return True
        return p.conditions(n)[0]

    while True:
        reason = scout.advance(StopCondition(predicate=scout_ready, t_max=cfg.bsg_t_max))
        if reason != "predicate":
            return False, f"no admissible T before {cfg.bsg_t_max}", None
        if scout.counter.count > n:
            return False, f"crossing count exceeds {n}", None
        T = scout.t
        ok = True
        why = ""
        for p in others:
            p.advance(StopCondition(t_end=T))
            good, why = p.conditions(n)
            if not good:
                ok = False
                break
        if ok:
            lo, hi = _hull_boxes([(p.lo, p.hi) for p in pieces])
            w = Witness(T=Interval(T), crossings=n, subdivisions=k)
            w.y, w.vy, w.delta, w.vdelta = (_comp(lo, hi, i) for i in range(4))
            w.leaves = [Leaf(p.b, True, T, n, p.lo.copy(), p.hi.copy()) for p in pieces]
            return True, "", w
        # move the scout past T before trying again
        if scout.counter.exact and scout.counter.count > n:
            return False, f"crossing count exceeds {n}", None


def bound_state_good(b: Interval, n: int, config: Optional[ProverConfig] = None) -> MethodResult:
    """Show ``b`` holds at most one ``n``-th bound state and no other bound state.

    There must be one time ``T`` at which, for every seed in ``b``, the
    crossing count is exactly ``n``, ``y(T)`` is small and strictly signed,
    ``v``, ``delta``, ``delta'`` all have the opposite sign, and the trapping
    test passes. ``b`` is split into pieces that share ``T``; the piece count
    grows on failure, and after that the start time ``t0`` shrinks.
    """
    cfg = config or ProverConfig()
    start = time.perf_counter()
    reasons = []
    for scale in (cfg.t0_scale,) + tuple(cfg.bsg_t0_fallback):
        c = cfg if scale == cfg.t0_scale else replace(
            cfg, t0_scale=scale,
            integrator=replace(cfg.integrator, h_min=min(cfg.integrator.h_min, cfg.fallback_h_min)))
        for k in cfg.bsg_pieces:
            try:
                ok, why, w = _bsg_try(b, n, k, c)
            except (StepFailure, MaxStepsExceeded, AmbiguousSign, TStarViolation) as exc:
                ok, why, w = False, f"{type(exc).__name__}: {exc}", None
            if ok:
                if c is not cfg:
                    for lf in w.leaves:
                        lf.note = f"t0 scale {scale}"
                return MethodResult(b, BOUNDSTATEGOOD, Proved(), w, n=n,
                                    seconds=time.perf_counter() - start)
            reasons.append(f"{k} pieces: {why}" if c is cfg else f"t0 scale {scale}, {k} pieces: {why}")
            if "exceeds" in why and "count" in why:
                return MethodResult(b, BOUNDSTATEGOOD, Failed("ConditionsNotMet; " + "; ".join(reasons)),
                                    Witness(), n=n, seconds=time.perf_counter() - start)
    return MethodResult(b, BOUNDSTATEGOOD, Failed("ConditionsNotMet; " + "; ".join(reasons)),
                        Witness(), n=n, seconds=time.perf_counter() - start)


# -- INFTYCROSSESMANY ---------------------------------------------------------
def infty_horizon(n: int, cfg: ProverConfig) -> float:
    """Integration limit in ``s`` for ``n + 1`` crossings; the zeros spread out like ``k^2``."""
    if cfg.infty_t_max is not None:
        return cfg.infty_t_max
    return max(600.0, 60.0 * (n + 1) ** 2)


def _infty_leaf(beta: Interval, n: int, cfg: ProverConfig) -> Leaf:
    seed = initial_enclosure_scaled(beta, Interval(*cfg.t0))
    counter = CrossingCounter(SCALED, 1, beta.lo)

    def done(traj) -> bool:
        counter.feed(traj.steps[-1])
        return counter.count >= n + 1

    try:
        traj = integrate(seed, stop=StopCondition(predicate=done, t_max=infty_horizon(n, cfg)),
                         system=SCALED, config=cfg.integrator)
    except (StepFailure, MaxStepsExceeded) as exc:
        return Leaf(beta, False, crossings=counter.count, note=f"integration: {exc}")
    lo, hi = traj.final_box()
    if traj.stop_reason != "predicate":
        return Leaf(beta, False, traj.t_end, counter.count, lo, hi, note="too few crossings")
    return Leaf(beta, True, traj.t_end, counter.count, lo, hi)


def infty_crosses_many(beta: Interval, n: int, depth: Optional[int] = None,
                       config: Optional[ProverConfig] = None) -> MethodResult:
    """Show the rescaled solution changes sign at least ``n + 1`` times for every beta in ``beta``.

    Since ``w(s) = y(s/b)/b``, this gives at least ``n + 1`` zeros of
    ``y_b`` for every ``b >= 1/beta.hi``.
    """
    _check_beta(beta)
    cfg = config or ProverConfig()
    depth = cfg.max_depth if depth is None else depth
    start = time.perf_counter()
    leaves, ok = _bisect_leaves(beta, lambda piece: _infty_leaf(piece, n, cfg), depth)
    w = Witness(subdivisions=len(leaves) - 1, leaves=leaves)
    good = [lf for lf in leaves if lf.ok]
    if good:
        w.T = Interval(max(lf.T for lf in good))
        w.crossings = min(lf.crossings for lf in good)
        lo, hi = _hull_boxes([(lf.box_lo[:2], lf.box_hi[:2]) for lf in good])
        w.y, w.vy = _comp(lo, hi, 0), _comp(lo, hi, 1)
    status: Status = Proved() if ok else Failed(
        f"DepthExceeded near {leaves[-1].interval}: {leaves[-1].note}")
    return MethodResult(beta, INFTYCROSSESMANY, status, w, n=n,
                        seconds=time.perf_counter() - start)
