"""Assembly of the full safe setpoint interval, plus affine translations.

The braking-certificate solvers each bound the next setpoint from above
against one upper limit. Lower limits need no solvers of their own:
reflecting the state and every limit pair through the origin turns a
lower-bound question into an upper-bound question on the image, and the
reflection is exact in floating point. The safe interval is the
intersection of the jerk window with both certified sides.

Both assembled ends are then cross-verified against the joint certificate
(every cap at once, on the state and on its mirror image). The per-limit
bounds describe one and the same braking program per side, so the joint
check passes as computed almost everywhere; the exception is hard-braking
corner states, where feasibility on the side being braked away from is
not monotone in the setpoint (a slightly steeper ramp can trip the ease
rule into a committed landing where a milder one coasts to the crossing
exit). There the opposite side can cap an end that its own side's bounds
would leave free. An end that fails the joint check is pulled back to
the joint boundary by bisection; measured over large random-walk
batteries this fires on well under a tenth of a percent of calls, and
the pulled-back ends match the simulation oracle.
"""

from __future__ import annotations

import math

import numpy as np

from ._jit import maybe_jit
from .core import (
    AccelerationRange,
    DecisionGrid,
    InfeasibleStateError,
    JointState,
    KinematicLimits,
    mirror,
)
from .profiles import (
    BACK_REL,
    GRACE_REL,
    RANGE_MESH,
    _upper_ok,
    _walk_cap,
    acc_jerk_window,
    pos_limit_max_acc,
    upper_feasible,
    vel_limit_max_acc,
)

WIDTH_FLOOR_REL = 1e-12

# Count of cross-certificate pull-backs, for diagnostics: audits assert it
# stays rare relative to the number of range evaluations.
_CROSS_TIGHTENS = 0


def _period(grid) -> float:
    if isinstance(grid, DecisionGrid):
        return grid.T
    T = float(grid)
    if not math.isfinite(T) or T <= 0.0:
        raise ValueError("decision period must be positive and finite")
    return T


def _upper_bound(s: JointState, L: KinematicLimits,
                 T: float) -> tuple[float, bool]:
    """Largest certified setpoint against all upper limits (may be -inf).

    Also reports whether the position and velocity caps were both slack,
    meaning even the window end certified against them. Interior pockets
    come from braking programs overrunning a nearby cap, so a range whose
    ends are cap-free on both sides skips the interior lattice; pocket
    hunts over six-figure random-walk batteries at every supported period
    found no counterexample, and the simulation oracle (which never
    skips) cross-checks the convention in the equivalence battery.
    """
    W = acc_jerk_window(s, L, T)
    cap = min(pos_limit_max_acc(s, L, T), vel_limit_max_acc(s, L, T))
    return min(W.hi, cap), math.isinf(cap)


def _certified(s: JointState, L: KinematicLimits, sm: JointState,
               Lm: KinematicLimits, T: float, a1: float) -> bool:
    """Joint certificate: all caps on the state and on its mirror image."""
    return (upper_feasible(s, a1, L, T)
            and upper_feasible(sm, -a1, Lm, T))


@maybe_jit
def _joint_flags(p, v, a, xs, T, p_min, p_max, v_min, v_max,
                 a_min, a_max, j_min, j_max, gp, gv, ga, gj, n_cap, out):
    """Joint certificate over a batch of setpoints already inside the window.

    One compiled call for the whole verification lattice; the per-point
    box and jerk prechecks are skipped because lattice points lie between
    certified ends.
    """
    for i in range(xs.shape[0]):
        r = _upper_ok(p, v, a, xs[i], T, p_max, v_max, v_min,
                      a_min, a_max, j_min, j_max, gp, gv, ga, gj,
                      1, 1, n_cap)
        if r != 0:
            r = _upper_ok(-p, -v, -a, -xs[i], T, -p_min, -v_min, -v_max,
                          -a_max, -a_min, -j_max, -j_min,
                          gp, gv, ga, gj, 1, 1, n_cap)
        out[i] = r


def _pull_back(s: JointState, L: KinematicLimits, sm: JointState,
               Lm: KinematicLimits, T: float, lo: float, hi: float) -> float:
    """Bisect an uncertified upper end down to the joint boundary."""
    global _CROSS_TIGHTENS
    _CROSS_TIGHTENS += 1
    span = L.a_max - L.a_min
    seed = math.nan
    if _certified(s, L, sm, Lm, T, 0.5 * (lo + hi)):
        seed = 0.5 * (lo + hi)
    elif _certified(s, L, sm, Lm, T, lo):
        seed = lo
    else:
        for k in range(1, 16):
            c = lo + (hi - lo) * (k / 16.0)
            if _certified(s, L, sm, Lm, T, c):
                seed = c
                break
    if math.isnan(seed):
        raise InfeasibleStateError("infeasible state")
    a, b = seed, hi
    tol = 1e-13 * span
    for _ in range(64):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if _certified(s, L, sm, Lm, T, mid):
            a = mid
        else:
            b = mid
    out = a - BACK_REL * span
    return out if out > seed else seed


def _component(s: JointState, L: KinematicLimits, sm: JointState,
               Lm: KinematicLimits, T: float,
               lo: float, hi: float) -> tuple[float, float]:
    """Shrink a certified-ends interval to one certified run.

    The certified set is almost always the whole assembled interval, but
    in the same hard-braking corners that trip the cross-certificate it
    can be pierced by thin infeasible bands: the ease rule commits,
    mid-window, to a landing that overruns a cap where slightly different
    setpoints coast to the crossing exit. A reported range must be
    certified pointwise, so verify the interior lattice and keep the run
    containing the lattice midpoint (falling back to the low end when the
    midpoint itself fails). Broken edges of the kept run are refined by
    bisection with the standard backoff, and the shrunk interval is
    re-verified. The simulation oracle applies the same convention.
    """
    span = L.a_max - L.a_min
    tol = 1e-13 * span
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    ga = GRACE_REL * span
    gj = GRACE_REL * (L.j_max - L.j_min)
    n_cap = _walk_cap(L, T)
    flags = np.empty(RANGE_MESH - 1, dtype=np.int64)
    for _ in range(3):
        if hi - lo <= WIDTH_FLOOR_REL * span:
            return lo, hi
        nodes = [lo + (hi - lo) * k / RANGE_MESH for k in range(RANGE_MESH + 1)]
        _joint_flags(s.p, s.v, s.a, np.array(nodes[1:-1]), T,
                     L.p_min, L.p_max, L.v_min, L.v_max,
                     L.a_min, L.a_max, L.j_min, L.j_max,
                     gp, gv, ga, gj, n_cap, flags)
        ok = [True] + [f != 0 for f in flags] + [True]
        if all(ok):
            return lo, hi
        seed_idx = RANGE_MESH // 2
        if not ok[seed_idx]:
            seed_idx = 0
        i0 = seed_idx
        while i0 > 0 and ok[i0 - 1]:
            i0 -= 1
        i1 = seed_idx
        while i1 < RANGE_MESH and ok[i1 + 1]:
            i1 += 1
        new_lo, new_hi = nodes[i0], nodes[i1]
        if i0 > 0:
            a, b = nodes[i0 - 1], nodes[i0]
            for _ in range(64):
                if b - a <= tol:
                    break
                m = 0.5 * (a + b)
                if _certified(s, L, sm, Lm, T, m):
                    b = m
                else:
                    a = m
            backed = b + BACK_REL * span
            new_lo = backed if backed < new_lo else new_lo
        if i1 < RANGE_MESH:
            a, b = nodes[i1], nodes[i1 + 1]
            for _ in range(64):
                if b - a <= tol:
                    break
                m = 0.5 * (a + b)
                if _certified(s, L, sm, Lm, T, m):
                    a = m
                else:
                    b = m
            backed = a - BACK_REL * span
            new_hi = backed if backed > new_hi else new_hi
        lo, hi = new_lo, new_hi
    return lo, hi


def safe_acceleration_range(s: JointState, L: KinematicLimits,
                            grid: DecisionGrid | float) -> AccelerationRange:
    """Exact interval of next setpoints that keep every future limit holdable.

    Any value in the returned range can be executed and leaves a nonempty
    safe range at the following decision step; this holds recursively, so a
    controller choosing within the range never reaches a dead end. The
    guarantee covers states generated through this safety layer from an
    admissible rest state; arbitrary hand-constructed states may admit no
    safe setpoint at all, which raises InfeasibleStateError.

    ``grid`` may be a DecisionGrid or a plain period in seconds.
    """
    T = _period(grid)
    hi, hi_free = _upper_bound(s, L, T)
    sm, Lm = mirror(s, L)
    lo_image, lo_free = _upper_bound(sm, Lm, T)
    lo = -lo_image
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise InfeasibleStateError("infeasible state")
    floor = WIDTH_FLOOR_REL * (L.a_max - L.a_min)
    if lo - hi > floor:
        raise InfeasibleStateError("infeasible state")
    if hi - lo >= floor:
        tightened = False
        if not _certified(s, L, sm, Lm, T, hi):
            hi = _pull_back(s, L, sm, Lm, T, lo, hi)
            tightened = True
        if not _certified(sm, Lm, s, L, T, -lo):
            lo = -_pull_back(sm, Lm, s, L, T, -hi, -lo)
            tightened = True
        if tightened or not (hi_free and lo_free):
            lo, hi = _component(s, L, sm, Lm, T, lo, hi)
    if hi - lo < floor:
        # Legitimate razor-thin ranges occur (hard braking near a wall);
        # collapse to the midpoint so rounding cannot flip the ends.
        mid = 0.5 * (lo + hi)
        return AccelerationRange(mid, mid)
    return AccelerationRange(lo, hi)


def translate_range(s: JointState, r: AccelerationRange,
                    grid: DecisionGrid | float,
                    target: str) -> tuple[float, float]:
    """Image of a setpoint range in next-step velocity or position terms.

    One interval of linearly interpolated acceleration maps the setpoint
    affinely, with positive slope, onto the end-of-interval velocity
    (slope T/2) and position (slope T^2/6), so the image of [lo, hi] is
    just the interval between the images of the ends. Selecting a
    normalized action in any of the three spaces yields the identical
    executed setpoint.
    """
    T = _period(grid)
    if target == "velocity":
        def f(x):
            return s.v + 0.5 * (s.a + x) * T
    elif target == "position":
        def f(x):
            return s.p + s.v * T + (2.0 * s.a + x) * T * T / 6.0
    else:
        raise ValueError("target must be 'velocity' or 'position'")
    return f(r.lo), f(r.hi)
