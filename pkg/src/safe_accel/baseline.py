"""Continuous-time braking reference for the discretization comparison.

A grid-blind sibling of the analytic bounds: a candidate setpoint is
certified by continuous braking profiles whose switching instants are real
numbers rather than grid nodes. Only the first interval (the ramp onto the
setpoint, which both sides share) is evaluated on the grid; everything
after it assumes the jerk can change at any instant. On fine grids the
certified values agree with the discrete bounds; on coarse grids the
continuous certificate is blind to the fact that execution can only change
jerk at decision nodes, and always-max rollouts under it either pierce the
position cap or brake into an early stall and never reach it. The discrete
bounds carry grid-aware certificates and land exactly either way.

The reference is deliberately hermetic (no external trajectory-generation
library): the comparison needs a deterministic foil, not a product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    DecisionGrid,
    JointState,
    KinematicLimits,
    Trajectory,
    ViolationReport,
    check_limits,
    step_interval,
)
from .profiles import GRACE_REL, acc_jerk_window
from .roots import solve_quadratic
from .tasks import ConstantPolicy, rollout

__all__ = [
    "COMPARISON_LIMITS",
    "MethodComparison",
    "compare_rollout",
    "continuous_max_acc",
    "continuous_pos_max_acc",
    "continuous_vel_max_acc",
]

# Joint configuration for the headline frequency comparison, found once by
# the seeded scan in scripts/find_comparison_configs.py and frozen here.
# From rest at p_min under an always-max policy: at 300 Hz both methods
# park on p_max (terminals agree to well under 1e-3 of the range); at
# 10 Hz the continuous reference overshoots p_max by about 1.1% of the
# position scale; at 4 Hz it stalls about 9.5% of the range short. The
# exact bounds land on p_max to 1e-6 of the range at all three.
COMPARISON_LIMITS = KinematicLimits(
    p_min=-2.9, p_max=2.9, v_min=-1.9, v_max=1.9,
    a_min=-3.0, a_max=3.0, j_min=-50.0, j_max=50.0)

_SENTINEL = math.inf


def _period(grid) -> float:
    if isinstance(grid, DecisionGrid):
        return grid.T
    return float(grid)


def _ramp_extrema(p, v, a, a1, T):
    # Exact maxima of p and v over the shared first interval.
    j = (a1 - a) / T
    pe, ve, _ = step_interval(p, v, a, a1, T)
    p_hi = max(p, pe)
    v_hi = max(v, ve)
    if j != 0.0:
        ta = -a / j
        if 0.0 < ta < T:
            v_hi = max(v_hi, v + (a + 0.5 * j * ta) * ta)
    for tv in solve_quadratic(v, a, 0.5 * j):
        if 0.0 < tv < T:
            p_hi = max(p_hi, p + v * tv + (0.5 * a + j * tv / 6.0) * tv * tv)
    return p_hi, v_hi


def _full_brake_travel(v, a, L):
    # Forward travel until the velocity first crosses zero under the
    # hardest continuous brake (jerk floor, clamped on the acceleration
    # floor). Requires v >= 0.
    q1 = -L.j_min
    t_c = (a + math.sqrt(a * a + 2.0 * q1 * v)) / q1
    t_m = (a - L.a_min) / q1
    if t_c <= t_m:
        return v * t_c + 0.5 * a * t_c * t_c - q1 * t_c ** 3 / 6.0
    v_m = v + a * t_m - 0.5 * q1 * t_m * t_m
    p_m = v * t_m + 0.5 * a * t_m * t_m - q1 * t_m ** 3 / 6.0
    t_h = v_m / -L.a_min
    return p_m + v_m * t_h + 0.5 * L.a_min * t_h * t_h


def _rest_stop_travel(v, a, L):
    """Forward travel of the continuous braking profile from (v, a).

    The profile descends at the jerk floor, optionally holds the
    acceleration floor, and eases back at the jerk ceiling to land at rest
    exactly; its switching instants are continuous. States that can no
    longer level out before the velocity crosses zero coast through the
    crossing under the hardest brake instead (the same exit the discrete
    program uses), after which no further forward travel is possible.
    """
    q1, q2 = -L.j_min, L.j_max
    if v <= 0.0 and a <= 0.0:
        return 0.0
    if v < 0.0:
        disc = a * a + 2.0 * q1 * v
        if disc <= 0.0:
            return 0.0
        # Ride the descent to the ascending zero crossing, then restart.
        t0 = (a - math.sqrt(disc)) / q1
        if t0 >= (a - L.a_min) / q1:
            return 0.0
        return _rest_stop_travel(0.0, a - q1 * t0, L)
    if a < 0.0 and v < a * a / (2.0 * q2):
        return _full_brake_travel(v, a, L)
    budget = v + a * a / (2.0 * q1)
    a_star = -math.sqrt(2.0 * budget * q1 * q2 / (q1 + q2))
    if a_star >= L.a_min:
        t1 = (a - a_star) / q1
        v1 = v + a * t1 - 0.5 * q1 * t1 * t1
        d1 = v * t1 + 0.5 * a * t1 * t1 - q1 * t1 ** 3 / 6.0
        t3 = -a_star / q2
        d3 = v1 * t3 + 0.5 * a_star * t3 * t3 + q2 * t3 ** 3 / 6.0
        return d1 + d3
    t1 = (a - L.a_min) / q1
    v1 = v + a * t1 - 0.5 * q1 * t1 * t1
    d1 = v * t1 + 0.5 * a * t1 * t1 - q1 * t1 ** 3 / 6.0
    v2 = L.a_min * L.a_min / (2.0 * q2)
    t2 = (v1 - v2) / -L.a_min
    d2 = v1 * t2 + 0.5 * L.a_min * t2 * t2
    t3 = -L.a_min / q2
    d3 = v2 * t3 + 0.5 * L.a_min * t3 * t3 + q2 * t3 ** 3 / 6.0
    return d1 + d2 + d3


def _pos_ok(p, v, a, a1, T, L, gp):
    p_hi, _ = _ramp_extrema(p, v, a, a1, T)
    if p_hi > L.p_max + gp:
        return False
    p1, v1, _ = step_interval(p, v, a, a1, T)
    return p1 + _rest_stop_travel(v1, a1, L) <= L.p_max + gp


def _vel_ok(p, v, a, a1, T, L, gv):
    _, v_hi = _ramp_extrema(p, v, a, a1, T)
    if v_hi > L.v_max + gv:
        return False
    _, v1, _ = step_interval(p, v, a, a1, T)
    peak = v1 + a1 * a1 / (2.0 * -L.j_min) if a1 > 0.0 else v1
    return peak <= L.v_max + gv


def _sup(cond, w_lo, w_hi, span):
    # Largest setpoint in the window passing a monotone certificate.
    if cond(w_hi):
        return _SENTINEL
    if not cond(w_lo):
        return -math.inf
    a, b = w_lo, w_hi
    tol = 1e-13 * span
    for _ in range(64):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if cond(mid):
            a = mid
        else:
            b = mid
    return a


def continuous_pos_max_acc(s: JointState, L: KinematicLimits,
                           grid: DecisionGrid | float) -> float:
    """Largest setpoint whose continuous rest-stop clears the position cap.

    Sentinels as in the discrete bounds: +inf when even the window top is
    certified, -inf when nothing in the window is.
    """
    T = _period(grid)
    W = acc_jerk_window(s, L, T)
    gp = GRACE_REL * (L.p_max - L.p_min)
    return _sup(lambda x: _pos_ok(s.p, s.v, s.a, x, T, L, gp),
                W.lo, W.hi, L.a_max - L.a_min)


def continuous_vel_max_acc(s: JointState, L: KinematicLimits,
                           grid: DecisionGrid | float) -> float:
    """Largest setpoint whose continuous descent peak clears the velocity cap."""
    T = _period(grid)
    W = acc_jerk_window(s, L, T)
    gv = GRACE_REL * (L.v_max - L.v_min)
    return _sup(lambda x: _vel_ok(s.p, s.v, s.a, x, T, L, gv),
                W.lo, W.hi, L.a_max - L.a_min)


def continuous_max_acc(s: JointState, L: KinematicLimits,
                       grid: DecisionGrid | float) -> float:
    """Continuous-time supremum setpoint, capped by the one-interval window.

    The upper-cap command of the reference method: the smaller of the
    position and velocity certificates, clipped to the jerk/acceleration
    window over one period. Returns -inf when the continuous certificates
    reject the whole window.
    """
    T = _period(grid)
    W = acc_jerk_window(s, L, T)
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    span = L.a_max - L.a_min
    hi = min(
        W.hi,
        _sup(lambda x: _pos_ok(s.p, s.v, s.a, x, T, L, gp), W.lo, W.hi, span),
        _sup(lambda x: _vel_ok(s.p, s.v, s.a, x, T, L, gv), W.lo, W.hi, span),
    )
    return hi


def _command(p, v, a, T, L):
    # Rollout stepper: same certificates, no admissibility gate, and a
    # hard-brake fallback, so the reference keeps emitting setpoints even
    # after it has violated a cap (that is exactly what the comparison
    # needs to expose).
    w_lo = max(L.a_min, a + L.j_min * T)
    w_hi = min(L.a_max, a + L.j_max * T)
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    span = L.a_max - L.a_min
    cmd = min(
        w_hi,
        _sup(lambda x: _pos_ok(p, v, a, x, T, L, gp), w_lo, w_hi, span),
        _sup(lambda x: _vel_ok(p, v, a, x, T, L, gv), w_lo, w_hi, span),
    )
    if cmd == -math.inf:
        return w_lo
    return cmd


@dataclass(frozen=True, slots=True)
class MethodComparison:
    """Always-max rollouts of both methods at one decision frequency."""

    f_N: float
    ours: Trajectory
    baseline: Trajectory
    ours_report: ViolationReport
    baseline_report: ViolationReport


def compare_rollout(s0: JointState, L: KinematicLimits,
                    f_list: list[float],
                    duration: float = 8.0) -> list[MethodComparison]:
    """Roll both methods with always-max actions at each frequency.

    Ours consumes the top of the exact safe range every step; the
    reference commands its continuous-certificate supremum clipped to the
    one-interval window. Both trajectories are scanned densely for
    violations.
    """
    if not f_list:
        raise ValueError("need at least one frequency")
    out = []
    for f in f_list:
        grid = DecisionGrid(f)
        T = grid.T
        n = round(duration * f)
        if n < 1 or abs(n * T - duration) > 1e-9 * max(duration, T):
            raise ValueError("duration must be a positive multiple of "
                             "every decision period")
        ours = rollout(ConstantPolicy(1.0), s0, L, grid, duration)
        states = [s0]
        setpoints = []
        p, v, a = s0.p, s0.v, s0.a
        for _ in range(n):
            a1 = _command(p, v, a, T, L)
            p, v, a = step_interval(p, v, a, a1, T)
            states.append(JointState(p, v, a))
            setpoints.append(a1)
        base = Trajectory(grid=grid, states=states, setpoints=setpoints)
        out.append(MethodComparison(
            f_N=f,
            ours=ours,
            baseline=base,
            ours_report=check_limits(ours, L),
            baseline_report=check_limits(base, L),
        ))
    return out
