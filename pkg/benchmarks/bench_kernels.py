"""Compiled kernels vs the pure-Python fallback.

Each variant runs in its own interpreter because the numba switch is read at
import time.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from radial_uniqueness import _jit
from radial_uniqueness.integrator import MAIN, StopCondition, integrate, taylor_coeffs, IntegratorConfig
from radial_uniqueness.desingularize import initial_enclosure_main
from radial_uniqueness.interval import Interval

repeat = int(sys.argv[1])
b = Interval(4.33, 4.34)
seed = initial_enclosure_main(b, Interval(0.01, 0.0101))
lo, hi = seed.to_arrays()
cfg = IntegratorConfig(wrapping="hybrid")

def coeffs():
    taylor_coeffs(lo, hi, Interval(0.5), 15)

def run():
    integrate(seed, stop=StopCondition(t_end=1.0), config=cfg)

out = {"numba": _jit.GOT_NUMBA}
t = time.perf_counter(); coeffs(); run(); out["warmup_s"] = time.perf_counter() - t
for name, fn, n in (("taylor_coeffs", coeffs, 20), ("integrate_to_1", run, 1)):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        for _ in range(n):
            fn()
        best = min(best, (time.perf_counter() - t) / n)
    out[name] = best
print(json.dumps(out))
"""


def measure(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["RADIAL_UNIQUENESS_NO_NUMBA"] = "1"
    else:
        env.pop("RADIAL_UNIQUENESS_NO_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    t = time.perf_counter()
    jit = measure(False, args.repeat)
    py = measure(True, args.repeat)
    print(f"{'kernel':<16}{'numba [s]':>12}{'python [s]':>12}{'speedup':>10}")
    for key in ("taylor_coeffs", "integrate_to_1"):
        print(f"{key:<16}{jit[key]:>12.5f}{py[key]:>12.5f}{py[key] / jit[key]:>9.1f}x")
    print(f"numba warmup (compile or cache load): {jit['warmup_s']:.2f}s; total {time.perf_counter() - t:.1f}s")
    return jit, py


if __name__ == "__main__":
    main()
