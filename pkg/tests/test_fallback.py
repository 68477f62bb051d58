"""The pure-Python kernels must reproduce the compiled ones bit for bit."""
import json
import os
import subprocess
import sys

WORKER = r"""
import json
from radial_uniqueness import _jit
from radial_uniqueness.desingularize import initial_enclosure_main
from radial_uniqueness.integrator import StopCondition, integrate, taylor_coeffs
from radial_uniqueness.interval import Interval

seed = initial_enclosure_main(Interval(4.33, 4.34), Interval(0.01, 0.0101))
lo, hi = seed.to_arrays()
c_lo, c_hi = taylor_coeffs(lo, hi, Interval(0.5), 15)[:2]
tr = integrate(seed, stop=StopCondition(t_end=0.5))
end_lo, end_hi = tr.final_box()
print(json.dumps({
    "numba": _jit.GOT_NUMBA,
    "coeffs": [float(x).hex() for x in list(c_lo.ravel()) + list(c_hi.ravel())],
    "steps": len(tr.steps),
    "end": [float(x).hex() for x in list(end_lo) + list(end_hi)],
}))
"""


def run(no_numba):
    env = dict(os.environ)
    env.pop("RADIAL_UNIQUENESS_NO_NUMBA", None)
    if no_numba:
        env["RADIAL_UNIQUENESS_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def test_fallback_matches_compiled():
    jit, py = run(False), run(True)
    assert jit["numba"] and not py["numba"]
    assert jit["coeffs"] == py["coeffs"]
    assert jit["steps"] == py["steps"]
    assert jit["end"] == py["end"]
