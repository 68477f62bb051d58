"""Check that a plan covers the whole seed range, run its methods and write the certificate.

The certificate is plain JSON. Interval endpoints are stored as hex float
strings so a re-check sees exactly the numbers the prover saw.
``recheck_certificate`` re-validates the logical structure from the stored
leaf boxes without integrating anything.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import interval as iv
from .dynamics import box_energy
from .errors import CoverGap, ProverError
from .integrator import MAIN, Y_ONLY
from .interval import Interval
from .methods import (
    BOUNDSTATEGOOD,
    FALL,
    INFTYCROSSESMANY,
    Failed,
    Leaf,
    MethodResult,
    ProverConfig,
    bound_state_good,
    bsg_conditions,
    fall,
    infty_crosses_many,
)
from .planner import ProofPlan, float_solve, plan_dt

log = logging.getLogger(__name__)

VERSION = 1


def _hex(x: float) -> str:
    return float(x).hex()


def _pair(a: Optional[Interval]):
    return None if a is None else [_hex(a.lo), _hex(a.hi)]


def _unpair(p) -> Optional[Interval]:
    return None if p is None else Interval(float.fromhex(p[0]), float.fromhex(p[1]))


# -- cover --------------------------------------------------------------------
def verify_cover(plan: ProofPlan) -> dict:
    """Check that the plan's segments leave no seed ``b > sqrt(2)`` uncovered.

    The b-segments must start at or below sqrt(2) (rounded down) and
    overlap pairwise. Everything above the last one is handled through
    ``beta = 1/b``, so the beta segment must start at 0 and reach
    ``1/last.hi``. Raises ``CoverGap`` at the first hole.
    """
    segs = plan.segments
    if not segs:
        raise CoverGap(math.sqrt(2), "plan has no b-segments")
    first = segs[0].interval
    if not first.lo <= iv.SQRT2.lo:
        raise CoverGap(first.lo, f"first segment starts at {first.lo!r}, above sqrt(2)")
    overlaps = []
    reach = first.hi
    for k in range(len(segs) - 1):
        a, b = segs[k].interval, segs[k + 1].interval
        if not b.lo < reach:
            raise CoverGap(reach, f"segments {k} and {k + 1} do not overlap at {reach!r}")
        overlaps.append({"between": [k, k + 1], "overlap": [_hex(b.lo), _hex(min(a.hi, b.hi))]})
        reach = max(reach, b.hi)
    beta = plan.beta_segment
    if beta.lo > 0.0:
        raise CoverGap(math.inf, f"beta segment starts at {beta.lo!r} > 0")
    inv = Interval(1.0) / Interval(reach)
    if not inv.hi <= beta.hi:
        raise CoverGap(reach, f"1/{reach!r} is not inside the beta segment {beta}")
    return {
        "passed": True,
        "sqrt2_start": _hex(first.lo),
        "overlaps": overlaps,
        "b_end": _hex(reach),
        "inv_b_end": _hex(inv.hi),
        "beta_segment": _pair(beta),
    }


# -- execution ----------------------------------------------------------------
@dataclass(frozen=True)
class Task:
    method: str
    interval: Interval
    n: Optional[int] = None


def plan_tasks(plan: ProofPlan) -> List[Task]:
    tasks = [Task(s.method, s.interval, s.index) for s in plan.segments]
    tasks.append(Task(INFTYCROSSESMANY, plan.beta_segment, plan.n_states))
    return tasks


def run_task(task: Task, config: ProverConfig) -> MethodResult:
    start = time.perf_counter()
    try:
        if task.method == FALL:
            res = fall(task.interval, config=config)
        elif task.method == BOUNDSTATEGOOD:
            res = bound_state_good(task.interval, task.n, config)
        elif task.method == INFTYCROSSESMANY:
            res = infty_crosses_many(task.interval, task.n, config=config)
        else:
            res = MethodResult(task.interval, task.method, Failed(f"unknown method {task.method!r}"))
    except ProverError as exc:
        res = MethodResult(task.interval, task.method, Failed(f"{type(exc).__name__}: {exc}"), n=task.n)
    res.seconds = time.perf_counter() - start
    log.info("%s %s: %s (%.1fs)", task.method, task.interval, res.status, res.seconds)
    return res


def _run_task_star(args):
    return run_task(*args)


@dataclass
class ProofCertificate:
    n_states: int
    plan: ProofPlan
    results: List[MethodResult]
    cover_check: dict
    conclusions: List[dict]
    config_fingerprint: dict
    timing: dict = field(default_factory=dict)

    @property
    def proved(self) -> bool:
        return bool(self.conclusions) and all(c["unique"] for c in self.conclusions)

    @property
    def status(self) -> str:
        return "Proved" if self.proved else "Failed"

    def failures(self) -> List[MethodResult]:
        return [r for r in self.results if not r.proved]

    def to_json(self) -> dict:
        return {
            "version": VERSION,
            "n_states": self.n_states,
            "status": self.status,
            "segments": [_result_json(r) for r in self.results],
            "cover_check": self.cover_check,
            "conclusions": self.conclusions,
            "config": self.config_fingerprint,
            "plan": self.plan.to_json(),
            "timings": self.timing,
        }


def conclude(n_states: int, plan: ProofPlan, results: Sequence[MethodResult], cover_ok: bool) -> List[dict]:
    """Uniqueness of state k needs its own BOUNDSTATEGOOD, every other segment and the cover."""
    everything = cover_ok and all(r.proved for r in results)
    out = []
    for k in range(n_states + 1):
        own = [r for r in results if r.method == BOUNDSTATEGOOD and r.n == k]
        own_ok = len(own) == 1 and own[0].proved
        out.append({
            "state": k,
            "interval": _pair(own[0].interval) if own else None,
            "at_most_one_here": own_ok,
            "all_other_segments_empty": everything,
            "cover": cover_ok,
            "unique": bool(own_ok and everything),
        })
    return out


def execute(plan: ProofPlan, config: Optional[ProverConfig] = None, threads: int = 1) -> ProofCertificate:
    """Run every segment of ``plan`` and assemble the certificate.

    A cover gap is not raised here; it is recorded and every conclusion is
    then negative. Call ``verify_cover`` first to fail fast.
    """
    cfg = config or ProverConfig()
    start = time.perf_counter()
    try:
        cover = verify_cover(plan)
        cover_ok = True
    except CoverGap as exc:
        cover = {"passed": False, "gap": repr(exc.position), "message": str(exc)}
        cover_ok = False
    tasks = plan_tasks(plan)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_task_star, [(t, cfg) for t in tasks]))
    else:
        results = [run_task(t, cfg) for t in tasks]
    timing = {"segments": [round(r.seconds, 3) for r in results],
              "total": round(time.perf_counter() - start, 3)}
    return ProofCertificate(plan.n_states, plan, results, cover,
                            conclude(plan.n_states, plan, results, cover_ok),
                            cfg.fingerprint(), timing)


# -- serialization ------------------------------------------------------------
def _box_json(lo, hi):
    if lo is None:
        return None
    return [[_hex(a), _hex(b)] for a, b in zip(lo, hi)]


def _leaf_json(lf: Leaf) -> dict:
    return {
        "lo": _hex(lf.interval.lo),
        "hi": _hex(lf.interval.hi),
        "ok": lf.ok,
        "T": None if lf.T is None else _hex(lf.T),
        "crossings": lf.crossings,
        "box": _box_json(lf.box_lo, lf.box_hi),
        "note": lf.note,
    }


def _result_json(r: MethodResult) -> dict:
    w = r.witness
    return {
        "lo": _hex(r.interval.lo),
        "hi": _hex(r.interval.hi),
        "method": r.method,
        "index": r.n,
        "status": str(r.status),
        "witness": {
            "T": _pair(w.T),
            "y": _pair(w.y),
            "vy": _pair(w.vy),
            "delta": _pair(w.delta),
            "vdelta": _pair(w.vdelta),
            "crossings": w.crossings,
            "subdivisions": w.subdivisions,
            "leaves": [_leaf_json(lf) for lf in w.leaves],
        },
    }


def certificate_json(cert) -> dict:
    return cert.to_json() if isinstance(cert, ProofCertificate) else cert


def emit_certificate(cert, path) -> None:
    data = certificate_json(cert)
    if not data.get("segments"):
        raise ValueError("certificate has no segments")
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_certificate(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def canonical(cert) -> str:
    """Certificate JSON without timing fields, for comparing runs."""
    data = dict(certificate_json(cert))
    data.pop("timings", None)
    return json.dumps(data, sort_keys=True)


# -- tables and plots ---------------------------------------------------------
def _fmt_out(p) -> str:
    a = _unpair(p)
    return f"[{math.floor(a.lo * 1000) / 1000:.3f}, {math.ceil(a.hi * 1000) / 1000:.3f}]"


def emit_table(cert) -> str:
    """Plain-text table: ``Interval | Method | Details``, one block per segment."""
    data = certificate_json(cert)
    if not data.get("segments"):
        raise ValueError("certificate has no segments")
    lines = ["Interval | Method | Details"]
    for s in data["segments"]:
        lo, hi = float.fromhex(s["lo"]), float.fromhex(s["hi"])
        head = f"[{lo:.3f}, {hi:.3f}] {s['method']}"
        w = s["witness"]
        if s["status"] != "Proved":
            lines.append(f"{head} {s['status']}")
            continue
        if s["method"] == BOUNDSTATEGOOD:
            T = float.fromhex(w["T"][0])
            lines.append(f"{head} Bound state {s['index']}, used T={T:.3f}")
            for name, key in (("y(T)", "y"), ("y'(T)", "vy"), ("delta", "delta"), ("delta'", "vdelta")):
                lines.append(f"    {name} in {_fmt_out(w[key])}")
        elif s["method"] == INFTYCROSSESMANY:
            lines.append(f"{head} at least {w['crossings']} crossings, {w['subdivisions'] + 1} pieces")
        else:
            lines.append(f"{head} {w['subdivisions'] + 1} pieces")
    return "\n".join(lines)


def limit_sign(b: float, T: float = 60.0) -> int:
    """Float guess of ``lim y_b``: +1 or -1 once trapped in a well, 0 if not trapped by ``T``."""
    if b * b <= 2.0:
        return 1
    tr = float_solve(b, T, plan_dt(b), stop_trapped=True, record=False)
    if not tr.trapped:
        return 0
    return 1 if tr.final[0] > 0 else -1


def emit_plot_data(cert, path, samples: int = 400) -> int:
    """CSV of ``b, limit, bound_state`` over the certificate's b-range.

    ``limit`` comes from the float solver. ``bound_state`` is the state index
    for samples inside a proved BOUNDSTATEGOOD interval (where the sign of
    the limit flips) and empty elsewhere; the interval ends are sampled too.
    Returns the number of rows written.
    """
    data = certificate_json(cert)
    segs = [s for s in data.get("segments", []) if s["method"] != INFTYCROSSESMANY]
    if not segs:
        raise ValueError("certificate has no b-segments")
    lo = float.fromhex(segs[0]["lo"])
    hi = float.fromhex(segs[-1]["hi"])
    bands = [(float.fromhex(s["lo"]), float.fromhex(s["hi"]), s["index"])
             for s in segs if s["method"] == BOUNDSTATEGOOD and s["status"] == "Proved"]
    bs = set(np.linspace(lo, hi, samples).tolist())
    for a, b, _ in bands:
        bs.update(np.linspace(a, b, 9).tolist())
    rows = []
    for b in sorted(bs):
        idx = next((k for a, c, k in bands if a <= b <= c), None)
        rows.append((repr(b), limit_sign(b), "" if idx is None else idx))
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["b", "limit", "bound_state"])
        wr.writerows(rows)
    return len(rows)


# -- independent re-check -----------------------------------------------------
def _leaves_tile(seg: dict) -> bool:
    leaves = seg["witness"]["leaves"]
    if not leaves or not all(lf["ok"] for lf in leaves):
        return False
    if leaves[0]["lo"] != seg["lo"] or leaves[-1]["hi"] != seg["hi"]:
        return False
    return all(a["hi"] == b["lo"] for a, b in zip(leaves, leaves[1:]))


def _box_arrays(box):
    lo = np.array([float.fromhex(p[0]) for p in box])
    hi = np.array([float.fromhex(p[1]) for p in box])
    return lo, hi


def _recheck_segment(seg: dict, n_states: int) -> Optional[str]:
    if seg["status"] != "Proved":
        return "not proved"
    if not _leaves_tile(seg):
        return "leaves do not tile the segment"
    for lf in seg["witness"]["leaves"]:
        if seg["method"] == FALL:
            if float.fromhex(lf["hi"]) < iv.SQRT2.lo and lf["box"] is None:
                continue
            if lf["box"] is None:
                return f"leaf {lf['lo']} has no box"
            lo, hi = _box_arrays(lf["box"])
            system = MAIN if len(lo) == 4 else Y_ONLY
            if len(lo) == 3 and not (lo[2] <= 1.0 <= hi[2]):
                return f"leaf {lf['lo']}: parameter component does not contain 1"
            if not box_energy(lo, hi, system).hi < 0.0:
                return f"leaf {lf['lo']}: energy not negative"
        elif seg["method"] == BOUNDSTATEGOOD:
            lo, hi = _box_arrays(lf["box"])
            ok, why = bsg_conditions(lo, hi, Interval(float.fromhex(lf["T"])), seg["index"],
                                     lf["crossings"], True)
            if not ok:
                return f"leaf {lf['lo']}: {why}"
        elif seg["method"] == INFTYCROSSESMANY:
            if lf["crossings"] is None or lf["crossings"] < n_states + 1:
                return f"leaf {lf['lo']}: fewer than {n_states + 1} crossings"
        else:
            return f"unknown method {seg['method']}"
    return None


def recheck_certificate(cert) -> List[str]:
    """Re-validate a certificate from its stored data alone; returns the problems found.

    Checks the cover, that each segment's leaves tile it, the per-leaf
    conditions (negative energy for FALL, the BOUNDSTATEGOOD box conditions,
    the INFTYCROSSESMANY crossing count) and that every conclusion follows
    from them.
    """
    data = certificate_json(cert)
    problems: List[str] = []
    n = data["n_states"]
    segs = data["segments"]
    try:
        verify_cover(ProofPlan.from_json(data["plan"]))
        cover_ok = True
    except CoverGap as exc:
        problems.append(f"cover: {exc}")
        cover_ok = False
    plan_segs = ProofPlan.from_json(data["plan"])
    expected = [(_hex(s.interval.lo), _hex(s.interval.hi), s.method) for s in plan_segs.segments]
    expected.append((_hex(plan_segs.beta_segment.lo), _hex(plan_segs.beta_segment.hi), INFTYCROSSESMANY))
    if [(s["lo"], s["hi"], s["method"]) for s in segs] != expected:
        problems.append("segments do not match the plan")
    seg_ok = []
    for k, s in enumerate(segs):
        why = _recheck_segment(s, n)
        seg_ok.append(why is None)
        if why is not None:
            problems.append(f"segment {k} {s['method']}: {why}")
    everything = cover_ok and all(seg_ok) and not problems
    for c in data["conclusions"]:
        own = [ok for s, ok in zip(segs, seg_ok) if s["method"] == BOUNDSTATEGOOD and s["index"] == c["state"]]
        allowed = everything and len(own) == 1 and own[0]
        if c["unique"] and not allowed:
            problems.append(f"state {c['state']}: uniqueness claimed without support")
    if {c["state"] for c in data["conclusions"]} != set(range(n + 1)):
        problems.append("conclusions do not list every state")
    return problems
