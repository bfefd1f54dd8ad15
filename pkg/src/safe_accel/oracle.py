"""Independent verification of the braking-certificate family.

The closed-form solvers assert that a setpoint's deterministic braking
program respects the caps; this module re-decides the same membership
question by forward simulation. Every interval is probed densely
(``N_SUB`` uniform samples) as well as at its interior stationary points,
the state is stepped with its own arithmetic, and the landing is solved
through a different elimination (for the opening jerk rather than the
opening target). The two routes share only the family's acceptance
contract: the grace padding, the admissibility box for solved landings
and the stop residual rule. Agreement between them is therefore evidence
rather than tautology, and the differential tests demand it to fine
tolerance.

``brute_force_range`` locates the feasible interval by probing alone
(window seeds, a uniform scan fallback and plain bisection, no backoff)
and is the reference the assembled safe range is measured against.

``exhaustive_feasible`` replaces the single deterministic descent by a
bounded search over candidate setpoint paths, accepting only at nodes
where the family's landing rule fires or the early exit holds. It exists
to demonstrate that the greedy descent does not miss programs the wider
family would accept.
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
)
from .profiles import GRACE_REL, RANGE_MESH

DEFAULT_HORIZON = 400
BISECT_TOL_REL = 1e-8
SEED_COUNT = 64
N_SUB = 32


def _period(grid) -> float:
    if isinstance(grid, DecisionGrid):
        return grid.T
    T = float(grid)
    if not math.isfinite(T) or T <= 0.0:
        raise ValueError("decision period must be positive and finite")
    return T


@maybe_jit
def _interval_probe(p, v, a, j, T):
    """Dense-plus-stationary extrema of one constant-jerk interval.

    Returns (max position, max velocity, min velocity). Stationary points
    are included explicitly because uniform samples alone undershoot a
    tangent peak by the curvature of the arc between samples.
    """
    p_hi = p
    v_hi = v
    v_lo = v
    k = 1
    while k <= N_SUB:
        t = T * k / N_SUB
        vv = v + a * t + 0.5 * j * t * t
        pp = p + v * t + 0.5 * a * t * t + j * t * t * t / 6.0
        if pp > p_hi:
            p_hi = pp
        if vv > v_hi:
            v_hi = vv
        if vv < v_lo:
            v_lo = vv
        k += 1
    if j != 0.0:
        t = -a / j
        if 0.0 < t < T:
            vv = v + a * t + 0.5 * j * t * t
            if vv > v_hi:
                v_hi = vv
            if vv < v_lo:
                v_lo = vv
    half_j = 0.5 * j
    if half_j == 0.0:
        if a != 0.0:
            t = -v / a
            if 0.0 < t < T:
                pp = p + v * t + 0.5 * a * t * t
                if pp > p_hi:
                    p_hi = pp
    else:
        disc = a * a - 4.0 * half_j * v
        if disc >= 0.0:
            rt = math.sqrt(disc)
            t = (-a + rt) / (2.0 * half_j)
            if 0.0 < t < T:
                pp = p + v * t + 0.5 * a * t * t + j * t * t * t / 6.0
                if pp > p_hi:
                    p_hi = pp
            t = (-a - rt) / (2.0 * half_j)
            if 0.0 < t < T:
                pp = p + v * t + 0.5 * a * t * t + j * t * t * t / 6.0
                if pp > p_hi:
                    p_hi = pp
    return p_hi, v_hi, v_lo


@maybe_jit
def _land_len(v, a, T, a_min, a_max, j_min, j_max, ga, gj):
    """Smallest stop length, solved for the opening jerk directly.

    The admissibility box for the solved schedule (opening target between
    the window floor and ceiling with the combined pad, pre-final
    acceleration in the box, final jerk in the window) is part of the
    family contract and matches the closed-form side exactly; only the
    elimination differs.
    """
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
    m_cap = int((a_max - a_min) / (j_max * T)) + 4
    m = 2
    while m <= m_cap:
        denom = (m - 1.0) * T
        jf = (-v / T - 0.5 * a - (m - 1.0) * a
              - j_max * T * (m - 2.0) * (m - 1.0) * 0.5) / denom
        a1 = a + jf * T
        if a1 < lo_a1 - pad:
            if K > -0.5 * j_max * T * m * (m - 1.0):
                return 0
        elif a1 <= hi_a1 + pad:
            al = a1 + (m - 2.0) * j_max * T
            if a_min - ga <= al <= a_max + ga:
                jl = -al / T
                if j_min - gj <= jl <= j_max + gj:
                    return m
        m += 1
    return 0


@maybe_jit
def _sim_upper(p, v, a, a1, T, p_cap, v_cap, v_floor,
               a_min, a_max, j_min, j_max,
               gp, gv, ga, gj, check_p, check_v, check_floor, horizon):
    """Simulate the braking program and judge it against the selected caps.

    Same program semantics as the solver side: steepest descent, landing
    at the latest solvable node, early exit once velocity and acceleration
    are both nonpositive, floor checks deferred by one node so the exit
    interval may pierce the floor.
    """
    gab = ga
    if gj * T > gab:
        gab = gj * T
    j = (a1 - a) / T
    ph, vh, vl = _interval_probe(p, v, a, j, T)
    if check_p != 0 and ph > p_cap + gp:
        return 0
    if check_v != 0 and vh > v_cap + gv:
        return 0
    dip = vl
    p = p + v * T + (0.5 * a + j * T / 6.0) * T * T
    v = v + (a + 0.5 * j * T) * T
    a = a1
    n = 0
    while n < horizon:
        n += 1
        if v <= 0.0 and a <= 0.0:
            return 1
        if check_floor != 0 and dip < v_floor - gv:
            return 0
        nxt = a + j_min * T
        if nxt < a_min:
            nxt = a_min
        m = _land_len(v, a, T, a_min, a_max, j_min, j_max, ga, gj)
        stop = 0
        if m > 0:
            v_look = v + 0.5 * (a + nxt) * T
            if v_look <= 0.0:
                stop = 1
            elif _land_len(v_look, nxt, T, a_min, a_max,
                           j_min, j_max, ga, gj) == 0:
                stop = 1
        if stop != 0:
            denom = (m - 1.0) * T
            jf = (-v / T - 0.5 * a - (m - 1.0) * a
                  - j_max * T * (m - 2.0) * (m - 1.0) * 0.5) / denom
            k = 0
            while k < m:
                if k == 0:
                    jj = jf
                    an = a + jf * T
                elif k < m - 1:
                    jj = j_max
                    an = a + j_max * T
                else:
                    jj = -a / T
                    an = 0.0
                ph, vh, vl = _interval_probe(p, v, a, jj, T)
                if check_p != 0 and ph > p_cap + gp:
                    return 0
                if check_v != 0 and vh > v_cap + gv:
                    return 0
                if check_floor != 0 and vl < v_floor - gv:
                    return 0
                p = p + v * T + (0.5 * a + jj * T / 6.0) * T * T
                v = v + (a + 0.5 * jj * T) * T
                a = an
                k += 1
            if -gv <= v <= gv and -gab <= a <= gab:
                return 1
            return 0
        j = (nxt - a) / T
        ph, vh, vl = _interval_probe(p, v, a, j, T)
        if check_p != 0 and ph > p_cap + gp:
            return 0
        if check_v != 0 and vh > v_cap + gv:
            return 0
        dip = vl
        p = p + v * T + (0.5 * a + j * T / 6.0) * T * T
        v = v + (a + 0.5 * j * T) * T
        a = nxt
    return 0


def _entry_ok(s: JointState, a1: float, L: KinematicLimits, T: float) -> bool:
    # Setpoint box and one-interval jerk window, grace padded; the state
    # itself is judged by the simulated program, not by a box precheck.
    if not math.isfinite(a1):
        return False
    ga = GRACE_REL * (L.a_max - L.a_min)
    gj = GRACE_REL * (L.j_max - L.j_min)
    if not (L.a_min - ga <= a1 <= L.a_max + ga):
        return False
    j0 = (a1 - s.a) / T
    return L.j_min - gj <= j0 <= L.j_max + gj


def feasible(s: JointState, a1: float, L: KinematicLimits,
             grid: DecisionGrid | float,
             horizon: int = DEFAULT_HORIZON) -> bool:
    """Two-sided verdict: the braking program and its mirror both hold.

    Decided entirely by forward simulation with densely probed intervals.
    The mirrored side is produced by scalar negation of the state, the
    setpoint and every limit pair, which is exact in floating point.
    """
    T = _period(grid)
    if not _entry_ok(s, a1, L, T):
        return False
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    ga = GRACE_REL * (L.a_max - L.a_min)
    gj = GRACE_REL * (L.j_max - L.j_min)
    if _sim_upper(s.p, s.v, s.a, a1, T, L.p_max, L.v_max, L.v_min,
                  L.a_min, L.a_max, L.j_min, L.j_max,
                  gp, gv, ga, gj, 1, 1, 1, horizon) == 0:
        return False
    return _sim_upper(-s.p, -s.v, -s.a, -a1, T, -L.p_min, -L.v_min, -L.v_max,
                      -L.a_max, -L.a_min, -L.j_max, -L.j_min,
                      gp, gv, ga, gj, 1, 1, 1, horizon) != 0


def brute_force_range(s: JointState, L: KinematicLimits,
                      grid: DecisionGrid | float,
                      horizon: int = DEFAULT_HORIZON) -> AccelerationRange:
    """Feasible-setpoint interval located by probing alone.

    Seeds from the window midpoint and ends (then a uniform scan) and
    bisects each boundary to ``BISECT_TOL_REL`` of the acceleration span.
    No backoff is applied: the returned ends are the last feasible probes.
    Raises InfeasibleStateError when no probe in the window is feasible.

    The candidate interval is then verified on the shared interior
    lattice and shrunk to the feasible run around the lattice midpoint
    (falling back to the low end), the same pointwise convention the
    assembly side applies.
    """
    T = _period(grid)
    w_lo = max(L.a_min, s.a + L.j_min * T)
    w_hi = min(L.a_max, s.a + L.j_max * T)
    tol = BISECT_TOL_REL * (L.a_max - L.a_min)

    def ok(x: float) -> bool:
        return feasible(s, x, L, T, horizon)

    seed = math.nan
    for c in (0.5 * (w_lo + w_hi), w_lo, w_hi):
        if ok(c):
            seed = c
            break
    if math.isnan(seed):
        for k in range(1, SEED_COUNT):
            c = w_lo + (w_hi - w_lo) * (k / SEED_COUNT)
            if ok(c):
                seed = c
                break
    if math.isnan(seed):
        raise InfeasibleStateError("infeasible state")
    hi = w_hi
    if not ok(w_hi):
        a, b = seed, w_hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if ok(mid):
                a = mid
            else:
                b = mid
        hi = a
    lo = w_lo
    if not ok(w_lo):
        a, b = w_lo, seed
        while b - a > tol:
            mid = 0.5 * (a + b)
            if ok(mid):
                b = mid
            else:
                a = mid
        lo = b
    for _ in range(3):
        if hi - lo <= 0.0:
            break
        nodes = [lo + (hi - lo) * k / RANGE_MESH for k in range(RANGE_MESH + 1)]
        flags = [True] + [ok(x) for x in nodes[1:-1]] + [True]
        if all(flags):
            break
        seed_idx = RANGE_MESH // 2
        if not flags[seed_idx]:
            seed_idx = 0
        i0 = seed_idx
        while i0 > 0 and flags[i0 - 1]:
            i0 -= 1
        i1 = seed_idx
        while i1 < RANGE_MESH and flags[i1 + 1]:
            i1 += 1
        new_lo, new_hi = nodes[i0], nodes[i1]
        if i0 > 0:
            a, b = nodes[i0 - 1], nodes[i0]
            while b - a > tol:
                m = 0.5 * (a + b)
                if ok(m):
                    b = m
                else:
                    a = m
            new_lo = b
        if i1 < RANGE_MESH:
            a, b = nodes[i1], nodes[i1 + 1]
            while b - a > tol:
                m = 0.5 * (a + b)
                if ok(m):
                    a = m
                else:
                    b = m
            new_hi = a
        lo, hi = new_lo, new_hi
    return AccelerationRange(lo, hi)


def greedy_brake_feasible(s: JointState, a1: float, L: KinematicLimits,
                          grid: DecisionGrid | float,
                          horizon: int = DEFAULT_HORIZON) -> bool:
    """Position-only verdict on the real (unmirrored) braking program.

    The pure position projection used by the structural search tests;
    the velocity cap and floor are not consulted.
    """
    T = _period(grid)
    if not _entry_ok(s, a1, L, T):
        return False
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    ga = GRACE_REL * (L.a_max - L.a_min)
    gj = GRACE_REL * (L.j_max - L.j_min)
    return _sim_upper(s.p, s.v, s.a, a1, T, L.p_max, L.v_max, L.v_min,
                      L.a_min, L.a_max, L.j_min, L.j_max,
                      gp, gv, ga, gj, 1, 0, 0, horizon) != 0


def greedy_stop_depth(s: JointState, a1: float, L: KinematicLimits,
                      grid: DecisionGrid | float, max_depth: int = 64) -> int:
    """Node index at which the greedy program exits or commits its landing.

    Node 0 is the grid node right after the forced ramp interval. Returns
    -1 when the walk is still descending after ``max_depth`` nodes. Caps
    are ignored: this measures the program's shape, not its feasibility.
    """
    T = _period(grid)
    ga = GRACE_REL * (L.a_max - L.a_min)
    gj = GRACE_REL * (L.j_max - L.j_min)
    j = (a1 - s.a) / T
    p = s.p + s.v * T + (0.5 * s.a + j * T / 6.0) * T * T
    v = s.v + (s.a + 0.5 * j * T) * T
    a = a1
    for d in range(max_depth + 1):
        if v <= 0.0 and a <= 0.0:
            return d
        nxt = max(a + L.j_min * T, L.a_min)
        m = _land_len(v, a, T, L.a_min, L.a_max, L.j_min, L.j_max, ga, gj)
        if m > 0:
            v_look = v + 0.5 * (a + nxt) * T
            if v_look <= 0.0 or _land_len(v_look, nxt, T, L.a_min, L.a_max,
                                          L.j_min, L.j_max, ga, gj) == 0:
                return d
        j = (nxt - a) / T
        p = p + v * T + (0.5 * a + j * T / 6.0) * T * T
        v = v + (a + 0.5 * j * T) * T
        a = nxt
    return -1


@maybe_jit
def _stop_ok_p(p, v, a, m, T, p_cap, gp, gv, ga, gj, j_max):
    """Simulate the committed landing under the position cap only."""
    gab = ga
    if gj * T > gab:
        gab = gj * T
    denom = (m - 1.0) * T
    jf = (-v / T - 0.5 * a - (m - 1.0) * a
          - j_max * T * (m - 2.0) * (m - 1.0) * 0.5) / denom
    k = 0
    while k < m:
        if k == 0:
            jj = jf
            an = a + jf * T
        elif k < m - 1:
            jj = j_max
            an = a + j_max * T
        else:
            jj = -a / T
            an = 0.0
        ph, vh, vl = _interval_probe(p, v, a, jj, T)
        if ph > p_cap + gp:
            return 0
        p = p + v * T + (0.5 * a + jj * T / 6.0) * T * T
        v = v + (a + 0.5 * jj * T) * T
        a = an
        k += 1
    if -gv <= v <= gv and -gab <= a <= gab:
        return 1
    return 0


@maybe_jit
def _dfs_feasible(p0, v0, a0, x0, T, p_cap, a_min, a_max, j_min, j_max,
                  gp, gv, ga, gj, depth, branching):
    j = (x0 - a0) / T
    ph, vh, vl = _interval_probe(p0, v0, a0, j, T)
    if ph > p_cap + gp:
        return 0
    ps = np.empty(depth + 1)
    vs = np.empty(depth + 1)
    aa = np.empty(depth + 1)
    ci = np.zeros(depth + 1, dtype=np.int64)
    ps[0] = p0 + v0 * T + (0.5 * a0 + j * T / 6.0) * T * T
    vs[0] = v0 + (a0 + 0.5 * j * T) * T
    aa[0] = x0
    lvl = 0
    while lvl >= 0:
        p = ps[lvl]
        v = vs[lvl]
        a = aa[lvl]
        if ci[lvl] == 0:
            if v <= 0.0 and a <= 0.0:
                return 1
            nxt = a + j_min * T
            if nxt < a_min:
                nxt = a_min
            m = _land_len(v, a, T, a_min, a_max, j_min, j_max, ga, gj)
            if m > 0:
                fire = 0
                v_look = v + 0.5 * (a + nxt) * T
                if v_look <= 0.0:
                    fire = 1
                elif _land_len(v_look, nxt, T, a_min, a_max,
                               j_min, j_max, ga, gj) == 0:
                    fire = 1
                if fire != 0:
                    if _stop_ok_p(p, v, a, m, T, p_cap,
                                  gp, gv, ga, gj, j_max) != 0:
                        return 1
                    # The landing rule fired: the family commits here, so
                    # the node has no children.
                    ci[lvl] = branching
        if lvl == depth:
            lvl -= 1
            continue
        advanced = 0
        while ci[lvl] < branching:
            idx = ci[lvl]
            ci[lvl] += 1
            w_lo = a + j_min * T
            if w_lo < a_min:
                w_lo = a_min
            w_hi = a + j_max * T
            if w_hi > a_max:
                w_hi = a_max
            if idx == 0:
                x = w_lo
            elif idx == 1:
                x = a
            elif idx == 2:
                x = 0.5 * (w_lo + a)
            elif idx == 3:
                x = 0.5 * (w_lo + w_hi)
            elif idx == 4:
                x = 0.0
                if x < w_lo:
                    x = w_lo
                if x > w_hi:
                    x = w_hi
            elif idx == 5:
                x = 0.5 * (a + w_hi)
            else:
                x = w_hi
            j = (x - a) / T
            ph, vh, vl = _interval_probe(p, v, a, j, T)
            if ph > p_cap + gp:
                continue
            ps[lvl + 1] = p + v * T + (0.5 * a + j * T / 6.0) * T * T
            vs[lvl + 1] = v + (a + 0.5 * j * T) * T
            aa[lvl + 1] = x
            ci[lvl + 1] = 0
            lvl += 1
            advanced = 1
            break
        if advanced == 0:
            lvl -= 1
    return 0


def exhaustive_feasible(s: JointState, a1: float, L: KinematicLimits,
                        grid: DecisionGrid | float,
                        depth: int = 6, branching: int = 7) -> bool:
    """Position-only feasibility by bounded exhaustive search.

    Explores up to ``branching`` candidate setpoints per node, ``depth``
    intervals beyond the forced ramp interval. A node accepts on the early
    exit, or when the family's landing rule fires there and the committed
    landing clears the cap; a node where the rule fires is not expanded
    further, and a path that exhausts the depth without accepting rejects.
    Compared against the single-path verdict of
    :func:`greedy_brake_feasible` in the differential tests.
    """
    T = _period(grid)
    if not _entry_ok(s, a1, L, T):
        return False
    if depth < 1 or branching < 1 or branching > 7:
        raise ValueError("require depth >= 1 and 1 <= branching <= 7")
    gp = GRACE_REL * (L.p_max - L.p_min)
    gv = GRACE_REL * (L.v_max - L.v_min)
    ga = GRACE_REL * (L.a_max - L.a_min)
    gj = GRACE_REL * (L.j_max - L.j_min)
    return _dfs_feasible(s.p, s.v, s.a, a1, T, L.p_max,
                         L.a_min, L.a_max, L.j_min, L.j_max,
                         gp, gv, ga, gj, depth, branching) != 0
