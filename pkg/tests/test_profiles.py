"""Braking-profile solver tests: windows, position and velocity bounds."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from safe_accel.core import InadmissibleStateError, JointState, KinematicLimits
from safe_accel.profiles import (
    acc_jerk_window,
    next_decision_step,
    pos_limit_max_acc,
    upper_feasible,
    vel_limit_max_acc,
)
from tests.conftest import make_limits

SMALL = KinematicLimits(p_min=-1.0, p_max=1.0, v_min=-1.0, v_max=1.0,
                        a_min=-2.0, a_max=2.0, j_min=-10.0, j_max=10.0)


class TestWindow:
    def test_window_from_known_state(self):
        w = acc_jerk_window(JointState(0.0, 0.0, 0.5), SMALL, 0.1)
        assert w.lo == pytest.approx(-0.5)
        assert w.hi == pytest.approx(1.5)

    def test_window_clips_to_acceleration_box(self):
        w = acc_jerk_window(JointState(0.0, 0.0, 1.8), SMALL, 0.1)
        assert w.lo == pytest.approx(0.8)
        assert w.hi == pytest.approx(2.0)

    def test_window_rejects_inadmissible_state(self):
        with pytest.raises(InadmissibleStateError):
            acc_jerk_window(JointState(2.0, 0.0, 0.0), SMALL, 0.1)

    def test_window_at_acceleration_bound_stays_nonempty(self):
        w = acc_jerk_window(JointState(0.0, 0.0, 2.0), SMALL, 0.1)
        assert w.lo <= 2.0 <= w.hi


class TestGridSnap:
    def test_snaps_up_between_steps(self):
        assert next_decision_step(0.25, 0.1) == pytest.approx(0.3)

    def test_on_grid_time_stays_put(self):
        assert next_decision_step(0.3000000000001, 0.1) == pytest.approx(0.3)

    def test_zero_stays_zero(self):
        assert next_decision_step(0.0, 0.1) == 0.0


class TestPositionBound:
    def test_far_from_wall_is_not_binding(self):
        assert pos_limit_max_acc(JointState(0.0, 0.0, 0.0), SMALL, 0.1) \
            == math.inf

    def test_at_rest_on_wall_allows_no_real_freedom(self):
        # The exact boundary here is zero (hold the wall forever), and
        # accepted ends are backed off below the last certified probe, so
        # the reported bound sits a hair under zero. It must never grant
        # real push into the wall and the slack must stay a vanishing
        # fraction of the actuator range.
        hi = pos_limit_max_acc(JointState(1.0, 0.0, 0.0), SMALL, 0.1)
        span = SMALL.a_max - SMALL.a_min
        assert -1e-5 * span <= hi <= 0.0

    def test_retreating_from_wall_is_not_binding(self):
        assert pos_limit_max_acc(JointState(1.0, -0.5, 0.0), SMALL, 0.1) \
            == math.inf

    def test_fast_forward_mid_space_is_not_binding(self):
        assert pos_limit_max_acc(JointState(0.0, 1.0, 0.0), SMALL, 0.1) \
            == math.inf

    def test_doomed_state_has_no_feasible_setpoint(self):
        # Even at maximal braking the joint overruns the bound.
        assert pos_limit_max_acc(JointState(0.95, 0.6, -1.0), SMALL, 0.1) \
            == -math.inf

    def test_bound_is_a_member_and_above_is_not(self):
        # The reported bound must itself carry a certificate (that is the
        # point of the backoff) while a point clearly above it must not.
        span = SMALL.a_max - SMALL.a_min
        for s in (JointState(0.9, 0.3, 0.0), JointState(0.8, 0.4, 0.2),
                  JointState(0.97, 0.1, 0.4)):
            hi = pos_limit_max_acc(s, SMALL, 0.1)
            assert math.isfinite(hi)
            assert upper_feasible(s, hi, SMALL, 0.1, check_v=False)
            assert not upper_feasible(s, hi + 1e-6 * span, SMALL, 0.1,
                                      check_v=False)

    def test_more_headroom_never_tightens(self):
        s = JointState(0.9, 0.3, 0.0)
        roomier = KinematicLimits(p_min=-1.0, p_max=1.2, v_min=-1.0,
                                  v_max=1.0, a_min=-2.0, a_max=2.0,
                                  j_min=-10.0, j_max=10.0)
        assert pos_limit_max_acc(s, roomier, 0.1) \
            >= pos_limit_max_acc(s, SMALL, 0.1)


class TestVelocityBound:
    def test_far_from_limit_is_not_binding(self):
        assert vel_limit_max_acc(JointState(0.0, 0.0, 0.0), SMALL, 0.1) \
            == math.inf

    def test_cruising_at_limit_allows_zero(self):
        hi = vel_limit_max_acc(JointState(0.0, 1.0, 0.0), SMALL, 0.1)
        assert hi == pytest.approx(0.0, abs=1e-9)

    def test_peak_touches_limit_from_accelerating_state(self):
        # The full-rate ramp-down from a1 peaks where a crosses zero, at
        # v1 + a1^2 / (2 |j_min|) with v1 = 0.8 + (0.5 + a1) T / 2. Setting
        # the peak on v_max gives a1^2 + a1 - 3.5 = 0.
        hi = vel_limit_max_acc(JointState(0.0, 0.8, 0.5), SMALL, 0.1)
        assert hi == pytest.approx((math.sqrt(15.0) - 1.0) / 2.0, abs=1e-9)

    def test_peak_touches_limit_within_first_ramp_interval(self):
        # Same condition from v = 0.9, a = 1: a1^2 + a1 - 1 = 0.
        hi = vel_limit_max_acc(JointState(0.0, 0.9, 1.0), SMALL, 0.1)
        assert hi == pytest.approx((math.sqrt(5.0) - 1.0) / 2.0, abs=1e-9)

    def test_negative_velocity_side_is_quiet(self):
        assert vel_limit_max_acc(JointState(0.0, -1.0, 0.0), SMALL, 0.1) \
            == math.inf


@settings(max_examples=150, deadline=None)
@given(
    p=st.floats(-1.0, 1.0),
    v=st.floats(-1.0, 1.0),
    a=st.floats(-2.0, 2.0),
    f=st.sampled_from([4.0, 10.0, 20.0, 240.0]),
)
def test_bounds_are_never_nan(p, v, a, f):
    s = JointState(p, v, a)
    hi_p = pos_limit_max_acc(s, SMALL, 1.0 / f)
    hi_v = vel_limit_max_acc(s, SMALL, 1.0 / f)
    assert not math.isnan(hi_p)
    assert not math.isnan(hi_v)


def test_standard_limits_well_inside_everything():
    L = make_limits()
    s = JointState(0.0, 0.0, 0.0)
    assert pos_limit_max_acc(s, L, 0.1) == math.inf
    assert vel_limit_max_acc(s, L, 0.1) == math.inf
