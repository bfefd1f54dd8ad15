"""Braking-certificate solvers: per-limit bounds on the next setpoint.

Given a joint state at a decision step, each limited quantity (position,
velocity) admits a largest next acceleration setpoint for which a braking
continuation inside the jerk and acceleration windows still exists. This
module computes those bounds. Lower limits are handled by the caller
through the mirror reduction, so everything here faces upper caps only.

The certificate program
-----------------------

Feasibility of a setpoint is decided by one deterministic program per
(state, setpoint) pair:

    interval 0   ramp the acceleration linearly onto the setpoint;
    hard phase   from every following grid node, push the acceleration
                 down at the steepest admissible rate: full negative-jerk
                 intervals, a partial interval clamping onto the
                 acceleration floor, then holding the floor;
    landing      at the latest node from which a grid-aligned stop is
                 still solvable, ease off instead: one opening interval,
                 middle intervals at the positive jerk limit, and one
                 final interval, with jerks solved so acceleration and
                 velocity reach zero together at a grid node.

The walk exits early at any node where velocity and acceleration are both
nonpositive: from there the joint can only back away from the upper caps,
so nothing later can bind. The landing length is the smallest interval
count whose solved jerks and node accelerations respect the windows. A
setpoint is certified when every interval of its program keeps the
selected caps satisfied: position at or below its cap, velocity at or
below its cap and not below the velocity floor, with per-interval extrema
evaluated in closed form rather than sampled. The one interval that ends
in the early exit may pierce the floor; its dip is never executed by a
controller that re-certifies each step, and the exit node itself has
already left the upper caps behind.

The largest certified setpoint against the position cap is found by
bisection over the program. The velocity cap has a closed form: the
program's velocity peak telescopes to the continuous braking peak
``v1 + a1^2 / (2 |j_min|)`` exactly whenever the descent runs at the
full jerk floor. On grids coarse enough that the acceleration floor
truncates the descent mid-interval, the closed form is only an upper
bracket, so its root is verified against the program walk and bisected
down when rejected.

Tolerances
----------

Caps are true caps. ``GRACE_REL`` pads every acceptance comparison by a
relative amount far below any physical scale, so a certificate
re-evaluated from its own executed states cannot flip verdict on rounding
noise. Bisected bounds are additionally backed off by ``BACK_REL``:
a bisected bound pins at its own acceptance boundary, and without the
backoff the successor state would re-judge the same marginal peak as a
coin flip. The closed-form velocity bound needs no backoff, because its
binding peak re-evaluates identically (to rounding) one step later, well
inside the grace pad.

The oracle module decides membership in the same program family by
independent dense simulation; this module finds the largest certified
setpoint directly. The two must agree to fine tolerance, which is what
the differential tests enforce.
"""

from __future__ import annotations

import math

from ._jit import maybe_jit
from .core import (
    AccelerationRange,
    DecisionGrid,
    InadmissibleStateError,
    JointState,
    KinematicLimits,
)
from .roots import solve_quadratic

GRACE_REL = 1e-12
BACK_REL = 3e-9
_STATE_TOL_REL = 1e-9

# Interior verification lattice for assembled ranges. The assembly and the
# simulation oracle both check this many subdivisions of a candidate range
# and shrink to the certified run around the canonical seed, so a reported
# interval is certified pointwise, not only at its ends.
RANGE_MESH = 24

_SENTINEL = math.inf
_SEED_SCAN = 64


def _as_period(grid) -> float:
    if isinstance(grid, DecisionGrid):
        return grid.T
    T = float(grid)
    if not math.isfinite(T) or T <= 0.0:
        raise ValueError("decision period must be positive and finite")
    return T


def next_decision_step(t: float, T: float) -> float:
    """Smallest grid time >= t, snapping times already on the grid."""
    return T * math.ceil(t / T - 1e-12)


def acc_jerk_window(s: JointState, L: KinematicLimits,
                    grid: DecisionGrid | float) -> AccelerationRange:
    """One-interval reachable setpoint window from jerk and acceleration limits.

    Raises InadmissibleStateError when the state itself violates its box
    limits (no setpoint can repair that within the step). The box check
    carries a small relative tolerance: exact interval integration can park
    a state rounding-distance outside a limit it was certified against, and
    such states must not be rejected.
    """
    T = _as_period(grid)
    tp = _STATE_TOL_REL * (L.p_max - L.p_min)
    tv = _STATE_TOL_REL * (L.v_max - L.v_min)
    ta = _STATE_TOL_REL * (L.a_max - L.a_min)
    if not (L.p_min - tp <= s.p <= L.p_max + tp
            and L.v_min - tv <= s.v <= L.v_max + tv
            and L.a_min - ta <= s.a <= L.a_max + ta):
        raise InadmissibleStateError("inadmissible state")
    lo = max(L.a_min, s.a + L.j_min * T)
    hi = min(L.a_max, s.a + L.j_max * T)
    return AccelerationRange(lo, hi)


# ---------------------------------------------------------------------------
# Plain-float kernels (optionally compiled). Interval extrema are closed
# form: a constant-jerk interval has velocity extrema where the linear
# acceleration crosses zero and position extrema where the quadratic
# velocity does.
# ---------------------------------------------------------------------------


@maybe_jit
def _span_p_peak(p, v, a, j, T):
    end = p + v * T + 0.5 * a * T * T + j * T * T * T / 6.0
    pk = p if p > end else end
    if j == 0.0:
        if a != 0.0:
            t = -v / a
            if 0.0 < t < T:
                c = p + v * t + 0.5 * a * t * t
                if c > pk:
                    pk = c
    else:
        disc = a * a - 2.0 * j * v
        if disc > 0.0:
            rd = math.sqrt(disc)
            t = (-a - rd) / j
            if 0.0 < t < T:
                c = p + v * t + 0.5 * a * t * t + j * t * t * t / 6.0
                if c > pk:
                    pk = c
            t = (-a + rd) / j
            if 0.0 < t < T:
                c = p + v * t + 0.5 * a * t * t + j * t * t * t / 6.0
                if c > pk:
                    pk = c
    return pk


@maybe_jit
def _span_v_peak(v, a, j, T):
    end = v + a * T + 0.5 * j * T * T
    pk = v if v > end else end
    if j != 0.0:
        t = -a / j
        if 0.0 < t < T:
            c = v + a * t + 0.5 * j * t * t
            if c > pk:
                pk = c
    return pk


@maybe_jit
def _span_v_min(v, a, j, T):
    end = v + a * T + 0.5 * j * T * T
    lo = v if v < end else end
    if j != 0.0:
        t = -a / j
        if 0.0 < t < T:
            c = v + a * t + 0.5 * j * t * t
            if c < lo:
                lo = c
    return lo


@maybe_jit
def _landing_m(v, a, T, a_min, a_max, j_min, j_max, ga, gj):
    """Smallest interval count landing (v, a) on (0, 0) at a grid node.

    The landing uses one solved opening jerk, middle intervals at j_max,
    and one solved final jerk. For m intervals the opening target is

        a1 = (-v/T - a/2 - j_max T (m-2)(m-1)/2) / (m-1)

    and the schedule is admissible when a1, the pre-final acceleration and
    both solved jerks sit inside their (grace-padded) windows. Returns 0
    when no admissible count exists. The scan breaks early once a1 has
    fallen below its floor and the count-to-count increment has turned
    permanently negative, which for macroscopic velocities happens
    immediately.
    """
    jm = j_max
    K = -v / T - 0.5 * a
    lo_a1 = a + j_min * T
    if lo_a1 < a_min:
        lo_a1 = a_min
    hi_a1 = a + j_max * T
    if hi_a1 > a_max:
        hi_a1 = a_max
    pad = ga
    if gj * T > pad:
        pad = gj * T
    m_cap = int((a_max - a_min) / (jm * T)) + 4
    m = 2
    while m <= m_cap:
        a1 = (K - jm * T * (m - 2) * (m - 1) * 0.5) / (m - 1)
        if a1 < lo_a1 - pad:
            if K > -0.5 * jm * T * m * (m - 1.0):
                return 0
        elif a1 <= hi_a1 + pad:
            al = a1 + (m - 2) * jm * T
            if a_min - ga <= al <= a_max + ga:
                jl = -al / T
                if j_min - gj <= jl <= j_max + gj:
                    return m
        m += 1
    return 0


@maybe_jit
def _upper_ok(p, v, a, a1, T, p_cap, v_cap, v_floor,
              a_min, a_max, j_min, j_max,
              gp, gv, ga, gj, check_p, check_v, n_cap):
    """Walk the braking program from (p, v, a) with setpoint a1.

    Returns 1 when every interval respects the selected caps and the
    program reaches rest or an early exit, 0 otherwise. The floor check of
    each interval is deferred to the following node so the exit interval
    may pierce it.
    """
    gab = ga
    if gj * T > gab:
        gab = gj * T
    j = (a1 - a) / T
    if check_p != 0 and _span_p_peak(p, v, a, j, T) > p_cap + gp:
        return 0
    if check_v != 0 and _span_v_peak(v, a, j, T) > v_cap + gv:
        return 0
    dip = _span_v_min(v, a, j, T)
    p = p + v * T + 0.5 * a * T * T + j * T * T * T / 6.0
    v = v + a * T + 0.5 * j * T * T
    a = a1
    n = 0
    while n < n_cap:
        n += 1
        if v <= 0.0 and a <= 0.0:
            return 1
        if dip < v_floor - gv:
            return 0
        nxt = a + j_min * T
        if nxt < a_min:
            nxt = a_min
        m = _landing_m(v, a, T, a_min, a_max, j_min, j_max, ga, gj)
        ease = 0
        if m > 0:
            v_h = v + 0.5 * (a + nxt) * T
            if v_h <= 0.0:
                ease = 1
            elif _landing_m(v_h, nxt, T, a_min, a_max,
                            j_min, j_max, ga, gj) == 0:
                ease = 1
        if ease != 0:
            a1l = (-v / T - 0.5 * a
                   - j_max * T * (m - 2) * (m - 1) * 0.5) / (m - 1)
            k = 0
            while k < m:
                if k == 0:
                    jl = (a1l - a) / T
                    an = a1l
                elif k < m - 1:
                    jl = j_max
                    an = a + j_max * T
                else:
                    jl = -a / T
                    an = 0.0
                if check_p != 0 and _span_p_peak(p, v, a, jl, T) > p_cap + gp:
                    return 0
                if check_v != 0 and _span_v_peak(v, a, jl, T) > v_cap + gv:
                    return 0
                if _span_v_min(v, a, jl, T) < v_floor - gv:
                    return 0
                p = p + v * T + 0.5 * a * T * T + jl * T * T * T / 6.0
                v = v + a * T + 0.5 * jl * T * T
                a = an
                k += 1
            if -gv <= v <= gv and -gab <= a <= gab:
                return 1
            return 0
        j = (nxt - a) / T
        if check_p != 0 and _span_p_peak(p, v, a, j, T) > p_cap + gp:
            return 0
        if check_v != 0 and _span_v_peak(v, a, j, T) > v_cap + gv:
            return 0
        dip = _span_v_min(v, a, j, T)
        p = p + v * T + 0.5 * a * T * T + j * T * T * T / 6.0
        v = v + a * T + 0.5 * j * T * T
        a = nxt
    return 0


def _walk_cap(L: KinematicLimits, T: float) -> int:
    """Node budget covering descent, velocity kill at the floor and landing."""
    a_span = L.a_max - L.a_min
    v_top = L.v_max - L.v_min + L.a_max * L.a_max / (2.0 * -L.j_min)
    return int(math.ceil(a_span / (-L.j_min * T))
               + math.ceil(v_top / (-L.a_min * T))
               + math.ceil(a_span / (L.j_max * T)) + 16)


def upper_feasible(s: JointState, a1: float, L: KinematicLimits,
                   grid: DecisionGrid | float,
                   check_p: bool = True, check_v: bool = True) -> bool:
    """Whether the braking program from (s, a1) respects the selected caps.

    ``check_p`` / ``check_v`` select the position and velocity caps; the
    velocity floor is always enforced (only the early-exit interval may
    pierce it). The setpoint must sit inside the acceleration box and the
    one-interval jerk window; the state itself is judged by the program,
    not by a box precheck.
    """
    if not math.isfinite(a1):
        return False
    T = _as_period(grid)
    ga = GRACE_REL * (L.a_max - L.a_min)
    gj = GRACE_REL * (L.j_max - L.j_min)
    if not (L.a_min - ga <= a1 <= L.a_max + ga):
        return False
    j0 = (a1 - s.a) / T
    if not (L.j_min - gj <= j0 <= L.j_max + gj):
        return False
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    return _upper_ok(s.p, s.v, s.a, a1, T, L.p_max, L.v_max, L.v_min,
                     L.a_min, L.a_max, L.j_min, L.j_max,
                     gp, gv, ga, gj,
                     1 if check_p else 0, 1 if check_v else 0,
                     _walk_cap(L, T)) != 0


def pos_limit_max_acc(s: JointState, L: KinematicLimits,
                      grid: DecisionGrid | float) -> float:
    """Largest next setpoint certified against the upper position bound.

    Returns +inf when even the window top is certified (the bound cannot
    bind inside the one-interval window) and -inf when no certified
    setpoint exists at all; the caller decides how to report that. The
    certified set's upper boundary is located by bisection and backed off
    by ``BACK_REL`` of the acceleration span.
    """
    T = _as_period(grid)
    W = acc_jerk_window(s, L, T)
    span = L.a_max - L.a_min
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    ga = GRACE_REL * span
    gj = GRACE_REL * (L.j_max - L.j_min)
    cap = _walk_cap(L, T)

    def ok(x: float) -> bool:
        return _upper_ok(s.p, s.v, s.a, x, T, L.p_max, L.v_max, L.v_min,
                         L.a_min, L.a_max, L.j_min, L.j_max,
                         gp, gv, ga, gj, 1, 0, cap) != 0

    if ok(W.hi):
        return _SENTINEL
    if ok(W.lo):
        seed = W.lo
    else:
        seed = math.nan
        for k in range(1, _SEED_SCAN):
            c = W.lo + (W.hi - W.lo) * (k / _SEED_SCAN)
            if ok(c):
                seed = c
                break
        if math.isnan(seed):
            return -math.inf
    a, b = seed, W.hi
    tol = 1e-13 * span
    for _ in range(64):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if ok(mid):
            a = mid
        else:
            b = mid
    out = a - BACK_REL * span
    return out if out > seed else seed


def vel_limit_max_acc(s: JointState, L: KinematicLimits,
                      grid: DecisionGrid | float) -> float:
    """Largest next setpoint certified against the upper velocity bound.

    Same sentinel conventions as :func:`pos_limit_max_acc`. An algebraic
    root is computed first: the program's velocity peak is the larger of
    the interval-0 peak and, for positive setpoints, the braking peak
    ``v1 + a1^2 / (2 |j_min|)``, and both pieces are nondecreasing in the
    setpoint, so the candidate bound is the smallest applicable root of
    peak = cap (interval-0 end root, interval-0 interior root, or the
    quadratic braking-peak root). That algebra assumes the descent runs at
    the full jerk floor, which holds whenever ``a_min + |j_min| T <= 0``;
    on grids coarse enough to break that, the clamped interval softens the
    descent and raises the true peak, making the algebraic root only an
    upper bracket. The root is therefore certified by the same program
    walk the feasibility check uses, and bisected down (with the standard
    backoff) when rejected.
    """
    T = _as_period(grid)
    W = acc_jerk_window(s, L, T)
    cap = L.v_max
    q = -L.j_min
    span = L.a_max - L.a_min
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    ga = GRACE_REL * span
    gj = GRACE_REL * (L.j_max - L.j_min)
    n_cap = _walk_cap(L, T)

    def ok(x: float) -> bool:
        return _upper_ok(s.p, s.v, s.a, x, T, L.p_max, cap, L.v_min,
                         L.a_min, L.a_max, L.j_min, L.j_max,
                         gp, gv, ga, gj, 0, 1, n_cap) != 0

    if ok(W.hi):
        return _SENTINEL
    r = 2.0 * (cap - s.v) / T - s.a
    if s.a > 0.0 and cap > s.v:
        rb = s.a - s.a * s.a * T / (2.0 * (cap - s.v))
        if rb < r:
            r = rb
    if r > 0.0:
        r = max(solve_quadratic(2.0 * q * (s.v + 0.5 * s.a * T - cap),
                                q * T, 1.0))
    if r < W.lo:
        r = W.lo
    if r > W.hi:
        r = W.hi
    if ok(r):
        return r
    if ok(W.lo):
        seed = W.lo
    else:
        seed = math.nan
        for k in range(1, _SEED_SCAN):
            c = W.lo + (r - W.lo) * (k / _SEED_SCAN)
            if ok(c):
                seed = c
                break
        if math.isnan(seed):
            return -math.inf
    a, b = seed, r
    tol = 1e-13 * span
    for _ in range(64):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if ok(mid):
            a = mid
        else:
            b = mid
    out = a - BACK_REL * span
    return out if out > seed else seed
