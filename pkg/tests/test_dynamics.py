import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from checks import crossing_disagreements, rigorous_count
from oracle import crossing_times_main, crossings_main
from radial_uniqueness import interval as iv
from radial_uniqueness.dynamics import (
    CrossingCounter,
    box_energy,
    careful_step_cap,
    certify_no_double_cross,
    count_crossings,
    energy,
    energy_profile,
    energy_scaled,
    max_speed,
    sign_changes_lower_bound,
    turning_gap,
)
from radial_uniqueness.errors import AmbiguousSign
from radial_uniqueness.integrator import MAIN, SCALED, Y_ONLY, StopCondition, integrate
from radial_uniqueness.interval import Interval
from radial_uniqueness.methods import ProverConfig, _seed_main


def test_energy_values():
    assert energy(Interval(1.0), Interval(0.0)).contains(-0.25)
    assert energy(Interval(0.0), Interval(0.0)).contains(0.0)
    b = 4.3373
    # b^4/4 - b^2/2 = 79.068361516...
    assert energy(Interval(b), Interval(0.0)).contains(79.068361516075066)


def test_energy_scaled_reduces_to_main_at_beta_one():
    y, v = Interval(0.3, 0.4), Interval(-0.2, 0.1)
    e1, e2 = energy(y, v), energy_scaled(y, v, Interval(1.0))
    assert iv.intersect(e1, e2) is not None


def test_max_speed_values():
    assert max_speed(Interval(-0.25)) < 1e-7
    s = max_speed(Interval(0.0))
    assert s >= math.sqrt(0.5) and s - math.sqrt(0.5) < 1e-15
    # sqrt(2 * 79.068 + 1/2) = 12.5951...
    e0 = energy(Interval(4.3373), Interval(0.0))
    assert 12.5951 <= max_speed(e0) < 12.5952


def test_max_speed_scaled_floor():
    beta = Interval(0.1)
    assert max_speed(Interval(-(0.1 ** 4) / 4), beta) < 1e-7


def test_certify_no_double_cross():
    assert certify_no_double_cross(0.1, 12.6)
    assert not certify_no_double_cross(1.0, 12.6)
    assert certify_no_double_cross(1e9, 0.0)


def test_turning_gap():
    assert turning_gap(MAIN) == 2.0
    g = turning_gap(SCALED, 0.0, 0.0)
    assert g == 0.0
    # w^2 >= beta^2 + sqrt(beta^4 + 4E): at beta = 1, E = 0 this is 2
    assert turning_gap(Y_ONLY, 1.0, 0.0) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    assert turning_gap(Y_ONLY, 1.0, 0.0) <= 2 * math.sqrt(2)


def test_box_energy_contains_points():
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = rng.uniform(-2, 2, 2)
        w = rng.uniform(0, 0.3, 2)
        lo, hi = c - w, c + w
        e = box_energy(np.r_[lo, 0, 0], np.r_[hi, 0, 0])
        for _ in range(5):
            y, v = rng.uniform(lo, hi)
            true = 0.5 * v * v + y ** 4 / 4 - y * y / 2
            assert e.lo - 1e-12 <= true <= e.hi + 1e-12


def _traj(b, T, system_cap=True):
    seed = _seed_main(Interval(b), ProverConfig(t0=(0.1, 0.1)))
    return integrate(seed, stop=StopCondition(t_end=T),
                     step_cap=careful_step_cap(MAIN) if system_cap else None)


def test_count_bound_state_1_interval_to_2855():
    cfg = ProverConfig()
    seed = _seed_main(Interval(14.085, 14.115), cfg)
    tr = integrate(seed, stop=StopCondition(t_end=2.855), config=cfg.integrator, step_cap=careful_step_cap(MAIN))
    cc = count_crossings(tr)
    assert (cc.count, cc.exact, cc.last_sign) == (1, True, -1)


def test_count_fall_example():
    cc, tr = rigorous_count(1.5, 3.0)
    assert cc.count == 0 and cc.exact
    assert box_energy(*tr.final_box()).hi < 0


def test_constant_sign_short_run():
    cc = count_crossings(_traj(3.0, 0.3))
    assert (cc.count, cc.exact, cc.last_sign) == (0, True, 1)


def test_ambiguous_end_raises():
    # stop exactly at a zero of y, so the last box straddles it
    tc = crossing_times_main(20.0, 3.0)[0]
    tr = _traj(20.0, tc)
    assert tr.steps[-1].box_lo[0] < 0 < tr.steps[-1].box_hi[0]
    with pytest.raises(AmbiguousSign):
        count_crossings(tr)
    cc = count_crossings(tr, allow_pending=True)
    assert cc.count == 0 and not cc.exact


def test_counts_match_oracle_sample():
    bad, _ = crossing_disagreements(10, seed=5)
    assert bad == 0


def test_exact_count_survives_step_refinement():
    # halving the careful-stepping cap cannot change an exact count
    for b in (7.0, 22.0, 40.0):
        seed = _seed_main(Interval(b), ProverConfig(t0=(0.1, 0.1)))
        counts = []
        for factor in (1.0, 0.5):
            tr = integrate(seed, stop=StopCondition(t_end=6.0), step_cap=careful_step_cap(MAIN, factor))
            counts.append(count_crossings(tr, allow_pending=True))
        if counts[0].exact and counts[1].exact:
            assert counts[0].count == counts[1].count
        assert counts[0].count == crossings_main(b, 6.0) or not counts[0].exact


def test_lower_bound_and_profile():
    tr = _traj(20.0, 4.0)
    assert sign_changes_lower_bound(tr) <= crossings_main(20.0, 4.0)
    prof = energy_profile(tr)
    assert len(prof) == len(tr) + 1
    assert all(b.lo <= a.hi for a, b in zip(prof, prof[1:]))


def test_crossing_counter_incremental_matches_batch():
    tr = _traj(30.0, 5.0)
    c = CrossingCounter(MAIN, 1)
    for s in tr.steps:
        c.feed(s)
    assert c.result(allow_pending=True) == count_crossings(tr, allow_pending=True)
    assert len(c.crossing_times) == c.count


def test_counter_requires_signed_start():
    with pytest.raises(AmbiguousSign):
        CrossingCounter(MAIN, 0)


@settings(max_examples=30)
@given(st.floats(1.5, 40.0), st.floats(0.5, 5.0))
def test_energy_decay_along_trajectories(b, T):
    tr = _traj(b, T)
    prof = energy_profile(tr)
    assert all(nxt.lo <= cur.hi for cur, nxt in zip(prof, prof[1:]))
