import numpy as np
import pytest

from radial_uniqueness import interval as iv
from radial_uniqueness.errors import PlanningFailure
from radial_uniqueness.interval import Interval
from radial_uniqueness.planner import (
    BSG_MAX_WIDTH,
    ProofPlan,
    beta_threshold,
    build_plan,
    float_count,
    float_solve,
    float_solve_scaled,
    locate_bound_states,
)

LOCATED = [4.337387, 14.103585, 29.131212, 49.360710]


def always(b, n):
    return True


def test_float_solve_near_ground_state_two_step_sizes():
    a = float_solve(4.3373, 20.0, 1e-3)
    b = float_solve(4.3373, 20.0, 5e-4)
    assert a.crossings == b.crossings
    assert abs(a.final[0] - b.final[0]) < 1e-3
    # 4.3373 sits just below b0 = 4.33739, so y is caught in the right-hand well
    assert a.crossings == 0 and a.final[0] > 0.5 and a.energy()[-1] < 0


def test_float_solve_low_seed_traps():
    tr = float_solve(1.5, 20.0, 1e-3)
    assert tr.crossings == 0
    assert tr.energy()[-1] < 0


def test_float_solve_above_first_excited():
    assert float_solve(20.0, 20.0, 1e-4).crossings >= 2


def test_float_solve_rejects_nonpositive():
    with pytest.raises(ValueError):
        float_solve(0.0, 1.0, 1e-3)


def test_float_solve_scaled_beta_zero_keeps_crossing():
    tr = float_solve_scaled(0.0, 120.0, 0.01)
    # beta = 0 zeros near s = 6.9, 36, 102.6
    assert tr.crossings == 3


def test_locate_ground_state():
    (b0,) = locate_bound_states(0)
    assert abs(b0 - 4.3373) < 1e-3


def test_locate_first_four():
    bks = locate_bound_states(3)
    assert 14.09 < bks[1] < 14.12
    assert 49.339 <= bks[3] <= 49.381
    assert all(a < b for a, b in zip(bks, bks[1:]))
    assert np.allclose(bks, LOCATED, atol=2e-6)


def test_locate_stable_under_refinement():
    coarse = locate_bound_states(1)
    fine = locate_bound_states(1, dt_scale=0.5)
    assert max(abs(a - b) for a, b in zip(coarse, fine)) < 1e-4


def test_float_count_sides_of_b0():
    assert float_count(4.33) == 0 and float_count(4.35) == 1


def test_beta_thresholds():
    # oracle thresholds for 1..4 crossings
    assert beta_threshold(1) == 0.1
    assert abs(beta_threshold(2) - 0.0709) < 2e-4
    assert abs(beta_threshold(4) - 0.0202) < 2e-4


def test_plan_shape_n3():
    plan = build_plan(3, probe=always, bound_states=LOCATED)
    methods = [s.method for s in plan.segments]
    assert methods == ["FALL", "BOUNDSTATEGOOD"] * 4 + ["FALL"]
    assert [s.index for s in plan.bsg_segments()] == [0, 1, 2, 3]
    segs = [s.interval for s in plan.segments]
    assert all(a.hi > b.lo for a, b in zip(segs, segs[1:]))
    assert segs[0].lo <= iv.SQRT2.lo
    assert segs[-1].hi - segs[-2].hi >= 2
    assert (Interval(1.0) / Interval(segs[-1].hi)).hi <= plan.beta_segment.hi
    assert plan.beta_segment.lo == 0 and plan.beta_segment.hi <= 0.1
    for s, bk in zip(plan.bsg_segments(), LOCATED):
        assert s.interval.contains(bk) and s.interval.width <= BSG_MAX_WIDTH


def test_plan_shape_n0():
    plan = build_plan(0, probe=always, bound_states=LOCATED[:1])
    assert [s.method for s in plan.segments] == ["FALL", "BOUNDSTATEGOOD", "FALL"]
    # the buffer reaches b >= 10 so that beta <= 1/10
    assert plan.segments[-1].interval.hi >= 10
    assert plan.beta_segment.hi < 0.1


def test_plan_halves_until_probe_accepts():
    seen = []

    def probe(b, n):
        seen.append(b.width)
        return b.width < 0.05

    plan = build_plan(0, probe=probe, bound_states=LOCATED[:1])
    assert seen[0] <= BSG_MAX_WIDTH
    assert all(abs(b / a - 0.5) < 1e-9 for a, b in zip(seen, seen[1:]))
    assert plan.bsg_segments()[0].interval.width < 0.05


def test_plan_failure_at_min_width():
    with pytest.raises(PlanningFailure):
        build_plan(0, probe=lambda b, n: False, bound_states=LOCATED[:1])


def test_plan_json_roundtrip(tmp_path):
    plan = build_plan(1, probe=always, bound_states=LOCATED[:2])
    path = tmp_path / "plan.json"
    plan.dump(path)
    back = ProofPlan.load(path)
    assert back.n_states == 1
    assert [(s.interval, s.method, s.index) for s in back.segments] == \
        [(s.interval, s.method, s.index) for s in plan.segments]
    assert back.beta_segment == plan.beta_segment
    assert back.metadata["bound_states"] == LOCATED[:2]


def test_plan_with_rigorous_probe_n0():
    plan = build_plan(0)
    (seg,) = plan.bsg_segments()
    assert seg.interval.contains(4.3373) and seg.interval.width <= 0.2


def test_beta_threshold_zero_is_a_planning_failure(monkeypatch):
    import radial_uniqueness.planner as planner
    monkeypatch.setattr(planner, "beta_threshold", lambda n, T=0: 0.0)
    with pytest.raises(PlanningFailure):
        build_plan(0, probe=always, bound_states=LOCATED[:1])


def test_beta_threshold_many_crossings():
    # 9 crossings need s beyond the old fixed horizon of 2000
    assert beta_threshold(9) == 0.0
    assert beta_threshold(9, T=60.0 * 81) > 0.0
