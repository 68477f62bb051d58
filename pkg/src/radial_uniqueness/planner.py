"""Non-rigorous planning: find the bound states with a float solver and lay out
the intervals and methods the prover must verify.

Nothing here affects soundness. A bad plan only makes a rigorous method fail
or leaves a gap that ``verify_cover`` rejects.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ._jit import njit
from .errors import OracleAmbiguous, PlanningFailure
from .interval import Interval

log = logging.getLogger(__name__)

T_PLAN = 30.0
E_TRAPPED = -0.01
BSG_START_WIDTH = 0.5
BSG_MIN_WIDTH = 1e-4
# halving steps wider than this are skipped without probing
BSG_MAX_WIDTH = 0.2
BUFFER_WIDTH = 2.0


# -- float solver -------------------------------------------------------------
@njit
def _rhs(t, y, v, d, w, beta2, main):
    if main:
        return v, -2.0 * v / t - (y * y * y - y), w, -2.0 * w / t - (3.0 * y * y - 1.0) * d
    return v, -2.0 * v / t - (y * y * y - beta2 * y), 0.0, 0.0


@njit
def _rk4(y0, t_start, T, dt, beta2, main, stop_energy, record):
    n = int(math.ceil((T - t_start) / dt))
    out = np.empty((n + 1 if record else 1, 5))
    y, v, d, w = y0[0], y0[1], y0[2], y0[3]
    t = t_start
    out[0, 0] = t
    out[0, 1] = y
    out[0, 2] = v
    out[0, 3] = d
    out[0, 4] = w
    crossings = 0
    k = 0
    for k in range(1, n + 1):
        h = min(dt, T - t)
        a1, b1, c1, e1 = _rhs(t, y, v, d, w, beta2, main)
        a2, b2, c2, e2 = _rhs(t + h / 2, y + h / 2 * a1, v + h / 2 * b1, d + h / 2 * c1, w + h / 2 * e1, beta2, main)
        a3, b3, c3, e3 = _rhs(t + h / 2, y + h / 2 * a2, v + h / 2 * b2, d + h / 2 * c2, w + h / 2 * e2, beta2, main)
        a4, b4, c4, e4 = _rhs(t + h, y + h * a3, v + h * b3, d + h * c3, w + h * e3, beta2, main)
        yn = y + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        v = v + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        d = d + h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        w = w + h / 6 * (e1 + 2 * e2 + 2 * e3 + e4)
        if (yn > 0.0) != (y > 0.0):
            crossings += 1
        y = yn
        t = t + h
        if record:
            out[k, 0] = t
            out[k, 1] = y
            out[k, 2] = v
            out[k, 3] = d
            out[k, 4] = w
        if stop_energy:
            e = 0.5 * v * v + 0.25 * y ** 4 - 0.5 * beta2 * y * y
            if e < E_TRAPPED * (1.0 if main else beta2 * beta2 * 4.0):
                break
    if not record:
        out[0, 0] = t
        out[0, 1] = y
        out[0, 2] = v
        out[0, 3] = d
        out[0, 4] = w
        return out, crossings
    return out[: k + 1], crossings


@dataclass
class FloatTrajectory:
    """Samples ``(t, y, v, delta, v_delta)`` of a float solve, with its crossing count."""

    samples: np.ndarray
    crossings: int
    trapped: bool

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1, 1:]

    def energy(self) -> np.ndarray:
        y, v = self.samples[:, 1], self.samples[:, 2]
        return 0.5 * v * v + 0.25 * y ** 4 - 0.5 * y * y


def _series_start(b: float):
    t = min(1e-3, 1e-2 / b)
    f = b ** 3 - b
    fp = 3 * b * b - 1
    return t, np.array([b - t * t * f / 6, -t * f / 3, 1 - t * t * fp / 6, -t * fp / 3])


def float_solve(b: float, T: float, dt: float, stop_trapped: bool = False,
                record: bool = True) -> FloatTrajectory:
    """Classic RK4 on ``(y, v, delta, v_delta)`` from a series start near 0."""
    if not b > 0:
        raise ValueError("b must be positive")
    t0, x0 = _series_start(b)
    out, c = _rk4(x0, t0, T, dt, 1.0, True, stop_trapped, record)
    trapped = stop_trapped and out[-1, 0] < T - 1e-12
    return FloatTrajectory(out, int(c), bool(trapped))


def float_solve_scaled(beta: float, T: float, dt: float, stop_trapped: bool = True) -> FloatTrajectory:
    """RK4 on the rescaled equation; ``delta`` columns are unused."""
    t0 = 1e-3
    x0 = np.array([1 - (1 - beta * beta) * t0 * t0 / 6, -(1 - beta * beta) * t0 / 3, 0.0, 0.0])
    out, c = _rk4(x0, t0, T, dt, beta * beta, False, stop_trapped and beta > 0, False)
    return FloatTrajectory(out, int(c), bool(out[-1, 0] < T - 1e-12))


def plan_dt(b: float, dt: float = 2e-3) -> float:
    # the early dynamics run on the time scale 1/b
    return min(dt, dt / max(b, 1.0))


def float_count(b: float, dt: Optional[float] = None) -> int:
    dt = plan_dt(b) if dt is None else dt
    return float_solve(b, T_PLAN, dt, stop_trapped=True, record=False).crossings


# -- bound state location -----------------------------------------------------
def locate_bound_states(N: int, tol: float = 1e-6, dt_scale: float = 1.0,
                        check: bool = True) -> List[float]:
    """Approximate ``b_0 < ... < b_N`` by bisection on the float crossing count."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    out: List[float] = []

    def count(b, scale=dt_scale):
        return float_count(b, plan_dt(b) * scale)

    for k in range(N + 1):
        lo = math.sqrt(2) + 0.01 if k == 0 else out[-1] + 0.1
        if count(lo) > k:
            raise OracleAmbiguous(f"count at the bracket start {lo} already exceeds {k}")
        hi = lo * 1.5
        while count(hi) <= k:
            lo, hi = hi, hi * 1.5
            if hi > 1e4:
                raise OracleAmbiguous(f"no seed with more than {k} crossings found")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if count(mid) <= k:
                lo = mid
            else:
                hi = mid
        bk = 0.5 * (lo + hi)
        if check:
            # the bracket must survive a finer step
            eps = 1e-4
            if count(bk - eps, dt_scale / 2) != k or count(bk + eps, dt_scale / 2) <= k:
                raise OracleAmbiguous(f"crossing count near b_{k} = {bk} changes under dt refinement")
        log.info("b_%d ~ %.7f", k, bk)
        out.append(bk)
    return out


def beta_threshold(n_cross: int, T: float = 2000.0, dt: float = 0.01, tol: float = 1e-4) -> float:
    """Largest beta (up to 1/10) for which the float rescaled solution crosses zero ``n_cross`` times."""

    def enough(beta):
        return float_solve_scaled(beta, T, dt).crossings >= n_cross

    if enough(0.1):
        return 0.1
    lo, hi = 0.0, 0.1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if enough(mid):
            lo = mid
        else:
            hi = mid
    return lo


# -- plans --------------------------------------------------------------------
@dataclass
class Segment:
    interval: Interval
    method: str
    index: Optional[int] = None

    def to_json(self) -> dict:
        return {"lo": self.interval.lo.hex(), "hi": self.interval.hi.hex(),
                "lo_dec": repr(self.interval.lo), "hi_dec": repr(self.interval.hi),
                "method": self.method, "index": self.index}

    @classmethod
    def from_json(cls, d: dict) -> "Segment":
        return cls(Interval(float.fromhex(d["lo"]), float.fromhex(d["hi"])), d["method"], d.get("index"))


@dataclass
class ProofPlan:
    n_states: int
    segments: List[Segment]
    beta_segment: Interval
    metadata: dict = field(default_factory=dict)

    def bsg_segments(self) -> List[Segment]:
        return [s for s in self.segments if s.method == "BOUNDSTATEGOOD"]

    def to_json(self) -> dict:
        return {
            "n_states": self.n_states,
            "segments": [s.to_json() for s in self.segments],
            "beta_segment": {"lo": self.beta_segment.lo.hex(), "hi": self.beta_segment.hi.hex(),
                             "lo_dec": repr(self.beta_segment.lo), "hi_dec": repr(self.beta_segment.hi)},
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ProofPlan":
        bs = d["beta_segment"]
        return cls(d["n_states"], [Segment.from_json(s) for s in d["segments"]],
                   Interval(float.fromhex(bs["lo"]), float.fromhex(bs["hi"])), d.get("metadata", {}))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "ProofPlan":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _overlap(a: Interval) -> float:
    return min(1e-3, 0.05 * a.width)


def build_plan(N: int, probe: Optional[Callable[[Interval, int], bool]] = None,
               bound_states: Optional[List[float]] = None,
               max_width: float = BSG_MAX_WIDTH, config=None) -> ProofPlan:
    """Lay out FALL / BOUNDSTATEGOOD / INFTYCROSSESMANY segments for the first ``N + 1`` states.

    ``probe(interval, n)`` decides whether a BOUNDSTATEGOOD interval is
    accepted; by default the rigorous method itself is used. Intervals start
    at width 1/2 around each located state and halve until accepted; widths
    above ``max_width`` are passed over without a probe.
    """
    if probe is None:
        from .methods import bound_state_good

        def probe(b, n):
            return bound_state_good(b, n, config).proved

    bks = bound_states if bound_states is not None else locate_bound_states(N)
    if len(bks) != N + 1:
        raise PlanningFailure(f"expected {N + 1} bound-state locations, got {len(bks)}")
    bsg: List[Interval] = []
    widths = []
    for k, bk in enumerate(bks):
        w = BSG_START_WIDTH
        # keep clear of the neighbours and of sqrt(2)
        room = min(bk - (bks[k - 1] if k else math.sqrt(2)),
                   (bks[k + 1] - bk) if k < N else math.inf)
        w = min(w, room)
        while w > max_width:
            w /= 2
        while True:
            cand = Interval(bk - w / 2, bk + w / 2)
            if probe(cand, k):
                break
            w /= 2
            if w < BSG_MIN_WIDTH:
                raise PlanningFailure(f"BOUNDSTATEGOOD fails around b_{k} = {bk} at width {BSG_MIN_WIDTH}")
        log.info("state %d: BOUNDSTATEGOOD on %s", k, cand)
        bsg.append(cand)
        widths.append(w)

    segments: List[Segment] = []
    prev_hi = 1.414
    for k, seg in enumerate(bsg):
        ov = _overlap(seg)
        lo = prev_hi if k == 0 else prev_hi - _overlap(bsg[k - 1])
        segments.append(Segment(Interval(lo, seg.lo + ov), "FALL"))
        segments.append(Segment(seg, "BOUNDSTATEGOOD", k))
        prev_hi = seg.hi

    # zeros of the beta = 0 solution spread out roughly like k^2
    beta_star = beta_threshold(N + 1, T=max(2000.0, 60.0 * (N + 1) ** 2))
    if beta_star <= 0.0:
        raise PlanningFailure(f"no beta > 0 gives {N + 1} crossings within the oracle horizon")
    beta_target = min(0.9 * beta_star, 0.0999)
    end = max(prev_hi + BUFFER_WIDTH, 10.001, 1.0 / beta_target)
    end = float(np.nextafter(end, math.inf))
    segments.append(Segment(Interval(prev_hi - _overlap(bsg[-1]), end), "FALL"))
    beta_hi = (Interval(1.0) / Interval(end)).hi
    beta_seg = Interval(0.0, beta_hi)
    meta = {
        "bound_states": bks,
        "bsg_widths": widths,
        "t_plan": T_PLAN,
        "dt_rule": "min(2e-3, 2e-3 / b)",
        "beta_threshold": beta_star,
    }
    return ProofPlan(N, segments, beta_seg, meta)
