"""Tests for the assembled safe range and its velocity/position images."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from safe_accel.core import (
    AccelerationRange,
    DecisionGrid,
    InadmissibleStateError,
    InfeasibleStateError,
    JointState,
    KinematicLimits,
    integrate_interval,
    map_action,
    mirror,
)
from safe_accel.profiles import (
    acc_jerk_window,
    pos_limit_max_acc,
    vel_limit_max_acc,
)
from safe_accel.saferange import safe_acceleration_range, translate_range
from tests.conftest import make_limits, random_reachable

SMALL = KinematicLimits(p_min=-1.0, p_max=1.0, v_min=-1.0, v_max=1.0,
                        a_min=-2.0, a_max=2.0, j_min=-10.0, j_max=10.0)


class TestAssembly:
    def test_rest_mid_range_is_pure_jerk_window(self):
        L = make_limits()
        r = safe_acceleration_range(JointState(0.0, 0.0, 0.0),
                                    L, DecisionGrid(10.0))
        assert r.lo == pytest.approx(L.j_min * 0.1)
        assert r.hi == pytest.approx(L.j_max * 0.1)

    def test_small_box_rest_mid_range_is_pure_jerk_window(self):
        r = safe_acceleration_range(JointState(0.0, 0.0, 0.0), SMALL, 0.1)
        assert r.lo == pytest.approx(-1.0)
        assert r.hi == pytest.approx(1.0)

    def test_boundary_rest_pins_upper_end_near_zero(self):
        # Exact boundary is zero; the certified end is backed off a hair
        # below it, never above.
        r = safe_acceleration_range(JointState(1.0, 0.0, 0.0), SMALL, 0.1)
        assert -1e-5 * (SMALL.a_max - SMALL.a_min) <= r.hi <= 0.0
        assert r.lo < -0.5

    def test_accepts_grid_or_period(self):
        s = JointState(0.2, 0.1, 0.0)
        a = safe_acceleration_range(s, SMALL, DecisionGrid(10.0))
        b = safe_acceleration_range(s, SMALL, 0.1)
        assert (a.lo, a.hi) == (b.lo, b.hi)

    def test_inadmissible_state_raises(self):
        with pytest.raises(InadmissibleStateError):
            safe_acceleration_range(JointState(1.5, 0.0, 0.0), SMALL, 0.1)

    def test_doomed_state_raises_infeasible(self):
        with pytest.raises(InfeasibleStateError, match="infeasible state"):
            safe_acceleration_range(JointState(0.95, 0.6, -1.0), SMALL, 0.1)

    def test_worst_corner_state_raises_infeasible(self):
        L = make_limits()
        with pytest.raises(InfeasibleStateError):
            safe_acceleration_range(JointState(L.p_max, L.v_max, L.a_max),
                                    L, 0.1)

    def test_intersection_dominance(self):
        L = make_limits()
        rng = random.Random(5)
        for _ in range(40):
            T = rng.choice([1 / 240, 1 / 20, 1 / 10])
            s = random_reachable(rng, L, T)
            r = safe_acceleration_range(s, L, T)
            W = acc_jerk_window(s, L, T)
            assert W.lo - 1e-12 <= r.lo and r.hi <= W.hi + 1e-12
            assert r.hi <= pos_limit_max_acc(s, L, T) + 1e-12
            assert r.hi <= vel_limit_max_acc(s, L, T) + 1e-12

    def test_symmetry_is_exact(self):
        L = make_limits()
        rng = random.Random(6)
        for _ in range(25):
            T = rng.choice([1 / 240, 1 / 20, 1 / 10])
            s = random_reachable(rng, L, T)
            sm, Lm = mirror(s, L)
            r = safe_acceleration_range(s, L, T)
            rm = safe_acceleration_range(sm, Lm, T)
            assert rm.lo == -r.hi and rm.hi == -r.lo

    def test_razor_thin_range_collapses_to_midpoint(self):
        # Pinch the range by moving the wall toward a committed approach
        # until the position certificate leaves exactly the window floor.
        s = JointState(0.0, 0.9, 1.0)
        T = 0.1
        lo_cap, hi_cap = 0.2, 1.4

        def width(p_max):
            L = KinematicLimits(p_min=-1.0, p_max=p_max, v_min=-1.0,
                                v_max=2.0, a_min=-2.0, a_max=2.0,
                                j_min=-10.0, j_max=10.0)
            W = acc_jerk_window(s, L, T)
            return pos_limit_max_acc(s, L, T) - W.lo

        assert width(lo_cap) < 0.0 < width(hi_cap)
        for _ in range(80):
            mid = 0.5 * (lo_cap + hi_cap)
            if width(mid) > 0.0:
                hi_cap = mid
            else:
                lo_cap = mid
        L = KinematicLimits(p_min=-1.0, p_max=hi_cap, v_min=-1.0, v_max=2.0,
                            a_min=-2.0, a_max=2.0, j_min=-10.0, j_max=10.0)
        r = safe_acceleration_range(s, L, T)
        assert r.lo == r.hi

    def test_frozen_corner_states_reproduce(self):
        # Hand-frozen ranges for awkward states collected from long random
        # rollouts: hard braking near the wall, a mid-range state at a very
        # coarse grid, and a state one jerk quantum off the acceleration
        # floor. Values were cross-checked against the simulation oracle
        # when frozen; the slack covers the end backoff.
        L = make_limits()
        battery = [
            ((2.7637392268710097, 1.1190340772070897, -4.999999999999992),
             1 / 20, -5.0, -4.869168895),
            ((2.8764423361247418, 0.3982816903870013, -4.077294240920019),
             1 / 20, -5.0, -3.356746702),
            ((2.81062675298366, -0.056891262456778446, 2.5170021151337325),
             1 / 4, -3.732997885, -0.212399741),
            ((-1.4878228812666154, -1.4724898672505604, -1.7799189380044835),
             1 / 4, -1.348995784, 4.470081062),
            ((2.8620752309758957, 0.5493545098641024, -4.999930436082095),
             1 / 20, -5.0, -3.996781275),
            ((2.7, 0.9, 0.0), 1 / 10, -2.5, -1.625000030),
            ((2.813474405951819, 0.871042590434407, -4.919659470907318),
             1 / 20, -5.0, -4.929313182),
        ]
        for (p, v, a), T, lo, hi in battery:
            r = safe_acceleration_range(JointState(p, v, a), L, T)
            assert r.lo == pytest.approx(lo, abs=2e-6)
            assert r.hi == pytest.approx(hi, abs=2e-6)

    def test_short_rollout_never_dead_ends(self):
        L = make_limits()
        rng = random.Random(7)
        for _ in range(20):
            T = rng.choice([1 / 240, 1 / 20, 1 / 10])
            s = JointState(rng.uniform(-2.0, 2.0), 0.0, 0.0)
            for _ in range(30):
                r = safe_acceleration_range(s, L, T)
                m = rng.choice([-1.0, 1.0, rng.uniform(-1.0, 1.0)])
                s = integrate_interval(s, map_action(r, m), T)


class TestTranslation:
    def test_velocity_image_matches_closed_form(self):
        s = JointState(0.1, 0.2, 0.3)
        r = AccelerationRange(-0.5, 0.8)
        lo, hi = translate_range(s, r, 0.1, "velocity")
        assert lo == pytest.approx(0.2 + 0.5 * (0.3 - 0.5) * 0.1)
        assert hi == pytest.approx(0.2 + 0.5 * (0.3 + 0.8) * 0.1)

    def test_position_image_matches_closed_form(self):
        s = JointState(0.1, 0.2, 0.3)
        r = AccelerationRange(-0.5, 0.8)
        lo, hi = translate_range(s, r, 0.1, "position")
        assert lo == pytest.approx(0.1 + 0.02 + (0.6 - 0.5) * 0.01 / 6.0)
        assert hi == pytest.approx(0.1 + 0.02 + (0.6 + 0.8) * 0.01 / 6.0)

    def test_degenerate_range_maps_to_zero_width(self):
        s = JointState(0.0, 0.1, -0.2)
        lo, hi = translate_range(s, AccelerationRange(0.4, 0.4), 0.05,
                                 "position")
        assert lo == hi

    def test_unknown_target_rejected(self):
        with pytest.raises(ValueError):
            translate_range(JointState(0, 0, 0), AccelerationRange(0, 1),
                            0.1, "jerk")

    @settings(max_examples=100, deadline=None)
    @given(m=st.floats(-1.0, 1.0), lo=st.floats(-2.0, 0.0),
           w=st.floats(0.0, 3.0))
    def test_action_commutes_with_translation(self, m, lo, w):
        # Choosing the action in acceleration space and integrating must
        # land on the same numbers as mapping the action inside the
        # translated velocity range.
        s = JointState(0.05, -0.3, 0.25)
        T = 0.1
        r = AccelerationRange(lo, lo + w)
        a1 = map_action(r, m)
        nxt = integrate_interval(s, a1, T)
        vlo, vhi = translate_range(s, r, T, "velocity")
        v_direct = vlo + 0.5 * (1.0 + m) * (vhi - vlo)
        assert nxt.v == pytest.approx(v_direct, abs=1e-12)
