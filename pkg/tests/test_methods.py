import numpy as np
import pytest

from radial_uniqueness import interval as iv
from radial_uniqueness.dynamics import box_energy
from radial_uniqueness.errors import BetaRangeError, ConditionsNotMet, DepthExceeded
from radial_uniqueness.interval import Interval
from radial_uniqueness.methods import (
    BOUNDSTATEGOOD,
    FALL,
    INFTYCROSSESMANY,
    ProverConfig,
    bound_state_good,
    bsg_conditions,
    check_trap,
    fall,
    infty_crosses_many,
)

# state-0 witness from bound_state_good([4.266, 4.433], 0), T = 2.0133 (8 pieces)
W0_T = Interval(float.fromhex("0x1.01b3e13e04e18p+1"))  # 2.013302
W0_Y = Interval.from_hex(("0x1.23314111396a4p-3", "0x1.ab5804b0f9358p-3"))
W0_V = Interval.from_hex(("-0x1.1f59802db6216p-2", "-0x1.08160d48c1659p-2"))


def w0_energy():
    return box_energy(np.array([W0_Y.lo, W0_V.lo, 0, 0]), np.array([W0_Y.hi, W0_V.hi, 0, 0]))


def tiles(leaves, root):
    return (leaves[0].interval.lo == root.lo and leaves[-1].interval.hi == root.hi
            and all(a.interval.hi == b.interval.lo for a, b in zip(leaves, leaves[1:])))


# -- check_trap ---------------------------------------------------------------
def test_trap_holds_on_witness():
    E = w0_energy()
    assert 0 < E.lo and E.hi < 0.25
    assert check_trap(W0_Y, W0_V, E, W0_T)


def test_trap_fails_energy_too_big():
    assert not check_trap(W0_Y, W0_V, Interval(0.25, 0.26), W0_T)


def test_trap_fails_y_too_big():
    assert not check_trap(Interval(0.6, 0.7), W0_V, w0_energy(), W0_T)


def test_trap_fails_v_nonnegative():
    assert not check_trap(W0_Y, Interval(0.0, 0.02), w0_energy(), W0_T)


def test_trap_fails_product():
    # same box, later time: E (T - 2 ln E + 3/2) passes 3/8
    assert not check_trap(W0_Y, W0_V, w0_energy(), Interval(5.0))


def test_trap_fails_nonpositive_energy():
    assert not check_trap(W0_Y, W0_V, Interval(-0.01, 0.02), W0_T)


def test_bsg_conditions_odd_reflection():
    lo = np.array([-W0_Y.hi, -W0_V.hi, 0.3, 0.1])
    hi = np.array([-W0_Y.lo, -W0_V.lo, 0.35, 0.12])
    ok, why = bsg_conditions(lo, hi, W0_T, 1, 1, True)
    assert ok, why
    assert not bsg_conditions(lo, hi, W0_T, 1, 0, True)[0]
    assert not bsg_conditions(lo, hi, W0_T, 1, 1, False)[0]
    # delta on the wrong side
    lo2, hi2 = lo.copy(), hi.copy()
    lo2[2], hi2[2] = -0.1, -0.05
    assert "opposite" in bsg_conditions(lo2, hi2, W0_T, 1, 1, True)[1]


# -- FALL ---------------------------------------------------------------------
def test_fall_first_interval():
    r = fall(Interval(1.414, 4.26))
    assert r.proved and r.method == FALL
    assert tiles(r.witness.leaves, r.interval)
    assert r.witness.crossings == 0
    assert all(lf.crossings == 0 for lf in r.witness.leaves)


def test_fall_between_states_0_and_1():
    r = fall(Interval(4.42, 14.10))
    assert r.proved
    assert tiles(r.witness.leaves, r.interval)
    # every seed between the ground state and the first excited state crosses once
    assert {lf.crossings for lf in r.witness.leaves} == {1}


def test_fall_below_sqrt2_needs_no_integration():
    r = fall(Interval(1.0, 1.4))
    assert r.proved and r.witness.leaves[0].note == "below sqrt(2)"


def test_fall_fails_on_ground_state():
    r = fall(Interval(4.25, 4.43), depth=6)
    assert not r.proved
    with pytest.raises(DepthExceeded):
        r.raise_for_status()


# -- BOUNDSTATEGOOD -----------------------------------------------------------
def test_bsg_ground_state():
    r = bound_state_good(Interval(4.266, 4.433), 0)
    assert r.proved and r.method == BOUNDSTATEGOOD and r.n == 0
    w = r.witness
    assert w.T == W0_T
    assert w.y == W0_Y and w.vy == W0_V
    # the reported enclosures at T = 1.921 overlap this one's neighbourhood
    assert iv.intersect(w.y, Interval(0.127, 0.277)) is not None
    assert w.delta.hi < 0 and w.vdelta.hi < 0
    assert tiles(w.leaves, r.interval)


def test_bsg_state_2():
    r = bound_state_good(Interval(29.090, 29.174), 2)
    assert r.proved
    assert r.witness.y.lo > 0 and r.witness.vy.hi < 0


def test_bsg_wrong_index_fails():
    r = bound_state_good(Interval(4.266, 4.433), 1)
    assert not r.proved
    with pytest.raises(ConditionsNotMet):
        r.raise_for_status()


def test_bsg_deterministic():
    a = bound_state_good(Interval(14.085, 14.115), 1)
    b = bound_state_good(Interval(14.085, 14.115), 1)
    assert a.proved and b.proved
    assert a.witness.T == b.witness.T
    for la, lb in zip(a.witness.leaves, b.witness.leaves):
        assert np.array_equal(la.box_lo, lb.box_lo) and np.array_equal(la.box_hi, lb.box_hi)


# -- INFTYCROSSESMANY ---------------------------------------------------------
def test_infty_small_beta():
    r = infty_crosses_many(Interval(0.0, 0.019), 3)
    assert r.proved and r.method == INFTYCROSSESMANY
    assert r.witness.crossings >= 4
    assert tiles(r.witness.leaves, r.interval)


def test_infty_beta_zero_point():
    r = infty_crosses_many(Interval(0.0), 2)
    assert r.proved and r.witness.crossings >= 3


def test_infty_beta_range():
    with pytest.raises(BetaRangeError):
        infty_crosses_many(Interval(0.12, 0.13), 0)


def test_infty_too_many_crossings_requested_fails():
    cfg = ProverConfig(infty_t_max=30.0)
    r = infty_crosses_many(Interval(0.05, 0.06), 5, depth=2, config=cfg)
    assert not r.proved


def test_fingerprint_keys():
    fp = ProverConfig().fingerprint()
    assert fp["taylor_order"] == 15 and fp["wrapping"] == "hybrid"
    assert fp["t0"] == [0.1, 0.101]


def test_bsg_large_state_needs_smaller_t0():
    b = Interval(141.1118587, 141.1119587)
    no_fallback = bound_state_good(b, 6, ProverConfig(bsg_t0_fallback=(), bsg_pieces=(4,)))
    assert not no_fallback.proved
    res = bound_state_good(b, 6, ProverConfig(bsg_pieces=(4,)))
    assert res.proved
    assert all(lf.note.startswith("t0 scale") for lf in res.witness.leaves)
