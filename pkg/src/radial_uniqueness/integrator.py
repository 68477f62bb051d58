"""Validated Taylor integration of the radial system and the rescaled system.

A set of states is carried in Lohner form ``{center + transform @ r : r in box}``.
Each step validates an a-priori enclosure with a high-order Taylor test,
bounds the truncation remainder over it, and propagates the set through the
interval Jacobian of the Taylor map. The transform is re-orthonormalised by QR
every step to keep the wrapping effect in check.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels as K
from .desingularize import ScaledStateEnclosure, StateEnclosure
from .errors import MaxStepsExceeded, SingularTime, StepFailure
from .interval import Interval


@dataclass(frozen=True)
class System:
    """Which equation to integrate.

    ``main`` carries ``(y, y', delta, delta')``; ``scaled`` carries
    ``(w, w', beta)``. ``yv`` is the main equation without the variational
    part, run through the scaled kernel with the third component pinned at 1
    (the two equations coincide at ``beta = 1``).
    """

    kind: str

    @property
    def kernel_id(self) -> int:
        return K.MAIN if self.kind == "main" else K.SCALED

    @property
    def dim(self) -> int:
        return 4 if self.kind == "main" else 3

    @property
    def names(self) -> Tuple[str, ...]:
        if self.kind == "main":
            return ("y", "v_y", "delta", "v_delta")
        if self.kind == "yv":
            return ("y", "v_y", "one")
        return ("w", "v_w", "beta")


MAIN = System("main")
SCALED = System("scaled")
Y_ONLY = System("yv")


def scaled(beta=None) -> System:
    # beta travels in the state vector; the argument is accepted for symmetry
    return SCALED


@dataclass
class IntegratorConfig:
    order: int = 15
    # "qr" (orthonormal transform), "pped" (parallelepiped) or "hybrid"
    # (parallelepiped, falling back to QR when its inverse cannot be validated)
    tol: float = 1e-12
    # hybrid mode switches to QR once the parallelepiped inverse grows past this norm
    cond_max: float = 100.0
    h_min: float = 1e-6
    h_max: float = 0.25
    backoff: float = 0.7
    wrapping: str = "qr"
    max_steps: int = 200_000
    # a hull component wider than max_width * max(1, |component|) counts as blow-up
    max_width: float = 4.0


@dataclass
class EnclosureRepresentation:
    center: np.ndarray
    transform: np.ndarray
    box_lo: np.ndarray
    box_hi: np.ndarray

    @classmethod
    def from_box(cls, lo: Sequence[float], hi: Sequence[float]) -> "EnclosureRepresentation":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        center = 0.5 * lo + 0.5 * hi
        r_lo = np.array([K.dn(a - c) for a, c in zip(lo, center)])
        r_hi = np.array([K.up(b - c) for b, c in zip(hi, center)])
        return cls(center, np.eye(len(lo)), r_lo, r_hi)

    def hull(self) -> Tuple[np.ndarray, np.ndarray]:
        return K.affine_eval(self.center, self.transform, self.box_lo, self.box_hi)

    def orthonormality_defect(self) -> float:
        B = self.transform
        return float(np.max(np.abs(B.T @ B - np.eye(B.shape[0]))))


@dataclass
class TaylorStep:
    """One accepted step from ``t.lo`` to ``t.hi``."""

    order: int
    coeffs_lo: np.ndarray
    coeffs_hi: np.ndarray
    apriori_lo: np.ndarray
    apriori_hi: np.ndarray
    h: Interval
    t: Interval
    box_lo: np.ndarray
    box_hi: np.ndarray

    @property
    def t0(self) -> float:
        return self.t.lo

    @property
    def t1(self) -> float:
        return self.t.hi

    def component(self, i: int) -> Interval:
        return Interval(float(self.box_lo[i]), float(self.box_hi[i]))

    def apriori(self, i: int) -> Interval:
        return Interval(float(self.apriori_lo[i]), float(self.apriori_hi[i]))

    @property
    def coeffs(self) -> List[List[Interval]]:
        n = self.coeffs_lo.shape[1]
        return [[Interval(float(self.coeffs_lo[k, i]), float(self.coeffs_hi[k, i]))
                 for k in range(self.coeffs_lo.shape[0])] for i in range(n)]


@dataclass
class StopCondition:
    """When to stop: at time ``t_end``, when ``predicate(traj)`` holds, or at ``t_max``."""

    t_end: Optional[float] = None
    predicate: Optional[Callable[["Trajectory"], bool]] = None
    t_max: float = math.inf
    max_steps: Optional[int] = None


@dataclass
class Trajectory:
    system: System
    t_start: float
    start_lo: np.ndarray
    start_hi: np.ndarray
    steps: List[TaylorStep] = field(default_factory=list)
    rep: Optional[EnclosureRepresentation] = None
    stop_reason: str = ""

    @property
    def t_end(self) -> float:
        return self.steps[-1].t1 if self.steps else self.t_start

    def final_box(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.steps:
            return self.steps[-1].box_lo, self.steps[-1].box_hi
        return self.start_lo, self.start_hi

    def final_component(self, i: int) -> Interval:
        lo, hi = self.final_box()
        return Interval(float(lo[i]), float(hi[i]))

    def __len__(self) -> int:
        return len(self.steps)

    def to_csv(self, path) -> None:
        names = self.system.names
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            header = ["t_lo", "t_hi"]
            for nm in names:
                header += [f"{nm}_lo", f"{nm}_hi"]
            wr.writerow(header)
            wr.writerow([repr(self.t_start), repr(self.t_start)]
                        + [repr(float(v)) for pair in zip(self.start_lo, self.start_hi) for v in pair])
            for st in self.steps:
                wr.writerow([repr(st.t0), repr(st.t1)]
                            + [repr(float(v)) for pair in zip(st.box_lo, st.box_hi) for v in pair])


Seed = Union[StateEnclosure, ScaledStateEnclosure, EnclosureRepresentation]


def taylor_coeffs(state_lo, state_hi, t: Interval, order: int, system: System = MAIN):
    """Interval Taylor coefficients ``0..order`` of the solution through ``state`` at time ``t``.

    Returns ``(lo, hi)`` arrays of shape ``(order + 1, dim)``.
    """
    if t.lo <= 0.0:
        raise SingularTime(f"Taylor expansion requested at t = {t}")
    if order < 2:
        raise ValueError("order must be at least 2")
    c_lo, c_hi, _, _ = K.series(system.kernel_id, np.asarray(state_lo, dtype=float),
                                np.asarray(state_hi, dtype=float), t.lo, t.hi, order, False)
    return c_lo, c_hi


_WRAP_MODES = {"qr": K.WRAP_QR, "pped": K.WRAP_PPED, "hybrid": K.WRAP_HYBRID}


def _wrap_mode(name: str) -> int:
    try:
        return _WRAP_MODES[name]
    except KeyError:
        raise ValueError(f"unknown wrapping mode {name!r}") from None


def _predict_h(coeffs_lo: np.ndarray, coeffs_hi: np.ndarray, tol: float) -> float:
    p = coeffs_lo.shape[0]
    h = math.inf
    for k in (p - 2, p - 1):
        m = float(max(np.max(np.abs(coeffs_lo[k])), np.max(np.abs(coeffs_hi[k]))))
        if m > 0.0:
            h = min(h, (tol / m) ** (1.0 / k))
    return 0.8 * h


def step(enc: EnclosureRepresentation, t: float, h_try: float, system: System = MAIN,
         config: Optional[IntegratorConfig] = None, t_target: Optional[float] = None
         ) -> Tuple[EnclosureRepresentation, TaylorStep]:
    """Advance ``enc`` from ``t`` by (at most) ``h_try``, shrinking the step until it validates.

    ``t_target``, when given, is used verbatim as the step end for the first
    attempt so that integrations can land on an exact time.
    """
    cfg = config or IntegratorConfig()
    if t <= 0.0:
        raise SingularTime(f"cannot step from t = {t}")
    h = h_try
    mode = _wrap_mode(cfg.wrapping)
    first = True
    while True:
        if h < cfg.h_min and not (first and t_target is not None):
            raise StepFailure(f"no step >= {cfg.h_min} validates at t = {t}")
        t1 = t_target if (first and t_target is not None) else t + h
        first = False
        if t1 <= t:
            raise StepFailure(f"step underflow at t = {t}")
        out = K.lohner_step(system.kernel_id, enc.center, enc.transform, enc.box_lo, enc.box_hi,
                            t, t1, cfg.order, mode, cfg.cond_max)
        status = out[0]
        if status == K.OK:
            break
        h = (t1 - t) * cfg.backoff
    _, x1, B1, r1_lo, r1_hi, b_lo, b_hi, y_lo, y_hi, c_lo, c_hi = out
    if np.any(b_lo > b_hi):
        raise StepFailure(f"inconsistent enclosures at t = {t1}")
    new = EnclosureRepresentation(x1, B1, r1_lo, r1_hi)
    hI = Interval(K.dn(t1 - t), K.up(t1 - t))
    return new, TaylorStep(cfg.order, c_lo, c_hi, y_lo, y_hi, hI, Interval(t, t1), b_lo, b_hi)


def _seed_arrays(seed: Seed) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(seed, EnclosureRepresentation):
        return seed.hull()
    return seed.to_arrays()


def integrate(seed: Seed, t0: Optional[Interval] = None, stop: Optional[StopCondition] = None,
              system: Optional[System] = None, config: Optional[IntegratorConfig] = None,
              step_cap: Optional[Callable[[np.ndarray, np.ndarray], float]] = None) -> Trajectory:
    """Integrate a seed enclosure forward until ``stop`` is met.

    The seed box must hold at time ``t0.lo`` (every enclosure produced by
    ``desingularize`` holds on its whole window, so integration starts at
    the window's left end). ``step_cap(box_lo, box_hi)`` may impose an upper
    bound on the next step from the current hull.

    Raises ``StepFailure`` (with the partial trajectory attached as
    ``.trajectory``) or ``MaxStepsExceeded``.
    """
    cfg = config or IntegratorConfig()
    stop = stop or StopCondition()
    if system is None:
        system = SCALED if isinstance(seed, ScaledStateEnclosure) else MAIN
    if t0 is None:
        if isinstance(seed, EnclosureRepresentation):
            raise ValueError("t0 is required for a representation seed")
        t0 = seed.t
    t = float(t0.lo)
    if t <= 0.0:
        raise SingularTime("integration must start at a positive time")
    lo, hi = _seed_arrays(seed)
    rep = seed if isinstance(seed, EnclosureRepresentation) else EnclosureRepresentation.from_box(lo, hi)
    traj = Trajectory(system, t, np.array(lo, dtype=float), np.array(hi, dtype=float), rep=rep)
    if stop.t_end is not None and stop.t_end <= t:
        traj.stop_reason = "time"
        return traj
    max_steps = stop.max_steps or cfg.max_steps
    h = min(cfg.h_max, 0.05 * t)
    cur_lo, cur_hi = traj.start_lo, traj.start_hi
    while True:
        if len(traj.steps) >= max_steps:
            raise MaxStepsExceeded(f"{max_steps} steps without meeting the stop condition")
        h_try = min(h, cfg.h_max)
        if step_cap is not None:
            h_try = min(h_try, step_cap(cur_lo, cur_hi))
        target = None
        if stop.t_end is not None and t + h_try >= stop.t_end:
            target = stop.t_end
            h_try = stop.t_end - t
        try:
            rep, st = step(rep, t, h_try, system, cfg, t_target=target)
        except StepFailure as exc:
            exc.trajectory = traj
            raise
        traj.steps.append(st)
        traj.rep = rep
        cur_lo, cur_hi = st.box_lo, st.box_hi
        scale = np.maximum(1.0, np.maximum(np.abs(cur_lo), np.abs(cur_hi)))
        if np.any(cur_hi - cur_lo > cfg.max_width * scale):
            exc = StepFailure(f"enclosure width exceeded {cfg.max_width} at t = {st.t1}")
            exc.trajectory = traj
            raise exc
        h_next = _predict_h(st.coeffs_lo, st.coeffs_hi,
                            cfg.tol * max(1.0, float(np.max(np.abs(rep.center)))))
        h = min(h_next, 2.0 * (st.t1 - t) if target is None else h_next, 0.5 * st.t1)
        t = st.t1
        if stop.predicate is not None and stop.predicate(traj):
            traj.stop_reason = "predicate"
            return traj
        if stop.t_end is not None and t >= stop.t_end:
            traj.stop_reason = "time"
            return traj
        if t >= stop.t_max:
            traj.stop_reason = "horizon"
            return traj
