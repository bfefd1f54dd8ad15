"""Evaluation policies, rollouts and aggregate metrics.

The safety layer is exercised here the way a learning agent would use it:
a policy emits a normalized action in [-1, 1] at every decision step, the
action is mapped affinely into the current safe range, and the state is
integrated exactly across the interval. The shipped policies cover the
non-learning evaluations: riding one end of the range (constant action),
seeded uniform noise, and a bang-bang oscillation between the position
walls that serves as the velocity-maximizing reference.

The fuzz campaign rolls many seeded-random episodes and accumulates exact
per-interval extrema (closed-form stationary points, not sampling), so its
worst-case numbers are at least as strict as :func:`core.check_limits`
while staying fast enough for thousand-episode batteries.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ._jit import maybe_jit
from .core import (
    DecisionGrid,
    JointState,
    KinematicLimits,
    Trajectory,
    check_limits,
    integrate_interval,
    map_action,
    sample_interval,
)
from .saferange import safe_acceleration_range

__all__ = [
    "BangBangPolicy",
    "ConstantPolicy",
    "FuzzSummary",
    "Metrics",
    "RandomPolicy",
    "fuzz",
    "make_policy",
    "metrics",
    "rollout",
]

_VIOLATION_TOL = 1e-9


def _period(grid) -> float:
    if isinstance(grid, DecisionGrid):
        return grid.T
    return float(grid)


def _as_grid(grid) -> DecisionGrid:
    if isinstance(grid, DecisionGrid):
        return grid
    return DecisionGrid(1.0 / float(grid))


class ConstantPolicy:
    """Always the same normalized action; +1 rides the upper range end."""

    def __init__(self, m: float):
        if not (math.isfinite(m) and -1.0 <= m <= 1.0):
            raise ValueError("constant action must lie in [-1, 1]")
        self.m = float(m)

    def __call__(self, s: JointState) -> float:
        return self.m


class RandomPolicy:
    """Uniform actions on [-1, 1] driven by a recorded 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._rng = random.Random(self.seed)

    def __call__(self, s: JointState) -> float:
        return self._rng.uniform(-1.0, 1.0)


class BangBangPolicy:
    """Full push toward one position wall, flipping on arrival at rest.

    Emits +1 while chasing the upper wall; once the joint is parked there
    (position within a millionth of the span, speed below a millionth of
    the velocity scale) it flips to -1, and symmetrically. All braking is
    left to the safety layer; the policy only picks which wall to chase.
    """

    def __init__(self, L: KinematicLimits, direction: float = 1.0):
        if direction not in (1.0, -1.0):
            raise ValueError("direction must be +1 or -1")
        self.L = L
        self.direction = direction
        self._tol_p = 1e-6 * (L.p_max - L.p_min)
        self._tol_v = 1e-6 * max(L.v_max, -L.v_min)

    def __call__(self, s: JointState) -> float:
        if self.direction > 0.0:
            if abs(s.p - self.L.p_max) <= self._tol_p \
                    and abs(s.v) <= self._tol_v:
                self.direction = -1.0
        else:
            if abs(s.p - self.L.p_min) <= self._tol_p \
                    and abs(s.v) <= self._tol_v:
                self.direction = 1.0
        return self.direction


def make_policy(name: str, L: KinematicLimits, seed: int = 0):
    """Policy factory keyed by the CLI spelling: max, random or bangbang."""
    if name == "max":
        return ConstantPolicy(1.0)
    if name == "random":
        return RandomPolicy(seed)
    if name == "bangbang":
        return BangBangPolicy(L)
    raise ValueError(f"unknown policy {name!r}")


def rollout(policy, s0: JointState, L: KinematicLimits,
            grid: DecisionGrid | float, duration: float) -> Trajectory:
    """Roll a policy through the safety layer for a whole-step duration.

    Per step: compute the safe range, query the policy, map the action
    into the range, integrate exactly. The per-step ranges and raw actions
    are kept on the trajectory so the admissible band can be plotted
    alongside the curves.
    """
    T = _period(grid)
    n = round(duration / T)
    if n < 1 or abs(n * T - duration) > 1e-9 * max(duration, T):
        raise ValueError("duration must be a positive multiple of the "
                         "decision period")
    states = [s0]
    setpoints: list[float] = []
    actions: list[float] = []
    ranges = []
    s = s0
    for _ in range(n):
        r = safe_acceleration_range(s, L, T)
        m = float(policy(s))
        a1 = map_action(r, m)
        s = integrate_interval(s, a1, T)
        states.append(s)
        setpoints.append(a1)
        actions.append(m)
        ranges.append(r)
    return Trajectory(grid=_as_grid(grid), states=states,
                      setpoints=setpoints, actions=actions, ranges=ranges)


@dataclass(frozen=True, slots=True)
class Metrics:
    """Aggregate trajectory metrics, all normalized by the limit scales."""

    avg_norm_velocity: float
    max_norm_position: float
    max_norm_velocity: float
    violation_flag: bool

    def as_dict(self) -> dict:
        return {
            "avg_norm_velocity": self.avg_norm_velocity,
            "max_norm_position": self.max_norm_position,
            "max_norm_velocity": self.max_norm_velocity,
            "violation_flag": self.violation_flag,
        }


def metrics(traj: Trajectory, L: KinematicLimits,
            n_sub: int = 16) -> Metrics:
    """Dense-sampled trajectory summary.

    ``avg_norm_velocity`` is the time average of |v| over ``n_sub``
    trapezoid samples per interval, divided by the velocity scale
    ``max(v_max, -v_min)``; the worst normalized position/velocity and the
    violation flag come from :func:`core.check_limits`.
    """
    if not traj.setpoints:
        raise ValueError("empty trajectory")
    T = traj.grid.T
    v_scale = max(L.v_max, -L.v_min)
    total = 0.0
    for i, a1 in enumerate(traj.setpoints):
        pts = sample_interval(traj.states[i], a1, T, n_sub)
        acc = 0.5 * (abs(pts[0][2]) + abs(pts[-1][2]))
        for k in range(1, n_sub):
            acc += abs(pts[k][2])
        total += acc / n_sub
    report = check_limits(traj, L, tol=_VIOLATION_TOL)
    return Metrics(
        avg_norm_velocity=total / len(traj.setpoints) / v_scale,
        max_norm_position=report.position.worst,
        max_norm_velocity=report.velocity.worst,
        violation_flag=not report.ok,
    )


@maybe_jit
def _interval_extrema(p, v, a, j, T):
    # Exact extrema of p and v over one constant-jerk interval: velocity
    # extrema sit where the linear acceleration crosses zero, position
    # extrema where the quadratic velocity does.
    p_hi = p
    p_lo = p
    v_hi = v
    v_lo = v
    pe = p + v * T + (0.5 * a + j * T / 6.0) * T * T
    ve = v + (a + 0.5 * j * T) * T
    if pe > p_hi:
        p_hi = pe
    if pe < p_lo:
        p_lo = pe
    if ve > v_hi:
        v_hi = ve
    if ve < v_lo:
        v_lo = ve
    if j != 0.0:
        ta = -a / j
        if 0.0 < ta < T:
            vt = v + (a + 0.5 * j * ta) * ta
            if vt > v_hi:
                v_hi = vt
            if vt < v_lo:
                v_lo = vt
    half_j = 0.5 * j
    if half_j != 0.0:
        disc = a * a - 4.0 * half_j * v
        if disc >= 0.0:
            rt = math.sqrt(disc)
            for tv in ((-a - rt) / (2.0 * half_j), (-a + rt) / (2.0 * half_j)):
                if 0.0 < tv < T:
                    pt = p + v * tv + (0.5 * a + j * tv / 6.0) * tv * tv
                    if pt > p_hi:
                        p_hi = pt
                    if pt < p_lo:
                        p_lo = pt
    elif a != 0.0:
        tv = -v / a
        if 0.0 < tv < T:
            pt = p + v * tv + (0.5 * a + j * tv / 6.0) * tv * tv
            if pt > p_hi:
                p_hi = pt
            if pt < p_lo:
                p_lo = pt
    return p_lo, p_hi, v_lo, v_hi


@dataclass(frozen=True, slots=True)
class FuzzSummary:
    """Aggregate over a seeded-random episode battery."""

    episodes: int
    f_N: float
    duration: float
    seed: int
    violations: int
    violation_rate: float
    max_norm_position: float
    max_norm_velocity: float

    def as_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "f_N": self.f_N,
            "duration": self.duration,
            "seed": self.seed,
            "violations": self.violations,
            "violation_rate": self.violation_rate,
            "max_norm_position": self.max_norm_position,
            "max_norm_velocity": self.max_norm_velocity,
        }


def _episode(ep_seed: int, L: KinematicLimits, T: float,
             n: int) -> tuple[float, float, bool]:
    """One random episode; returns its worst normalized p, v and flag.

    The per-episode generator drives both the rest start position and the
    action stream, so an episode is a pure function of its seed. Extrema
    are exact per interval; a violation is any excess beyond the relative
    tolerance shared with :func:`core.check_limits`.
    """
    rng = random.Random(ep_seed)
    p_scale = max(abs(L.p_min), abs(L.p_max))
    v_scale = max(abs(L.v_min), abs(L.v_max))
    s = JointState(rng.uniform(L.p_min, L.p_max), 0.0, 0.0)
    worst_p = max(s.p - L.p_max, L.p_min - s.p)
    worst_v = -math.inf
    for _ in range(n):
        r = safe_acceleration_range(s, L, T)
        a1 = map_action(r, rng.uniform(-1.0, 1.0))
        j = (a1 - s.a) / T
        p_lo, p_hi, v_lo, v_hi = _interval_extrema(s.p, s.v, s.a, j, T)
        ep = max(p_hi - L.p_max, L.p_min - p_lo)
        ev = max(v_hi - L.v_max, L.v_min - v_lo)
        if ep > worst_p:
            worst_p = ep
        if ev > worst_v:
            worst_v = ev
        s = integrate_interval(s, a1, T)
    violated = (worst_p > _VIOLATION_TOL * p_scale
                or worst_v > _VIOLATION_TOL * v_scale)
    return 1.0 + worst_p / p_scale, 1.0 + worst_v / v_scale, violated


def _episode_batch(args) -> tuple[float, float, int]:
    seeds, limits, T, n = args
    L = KinematicLimits(*limits)
    worst_p = worst_v = -math.inf
    violations = 0
    for ep_seed in seeds:
        np_, nv, bad = _episode(ep_seed, L, T, n)
        worst_p = max(worst_p, np_)
        worst_v = max(worst_v, nv)
        violations += bad
    return worst_p, worst_v, violations


def worker_count() -> int:
    """Fuzz pool size: SAFE_ACCEL_THREADS if set, else the CPU count."""
    env = os.environ.get("SAFE_ACCEL_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("SAFE_ACCEL_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def fuzz(episodes: int, L: KinematicLimits, grid: DecisionGrid | float,
         seed: int, duration: float = 5.0,
         threads: int | None = None) -> FuzzSummary:
    """Seeded-random episode battery with exact worst-case accounting.

    Every episode starts at rest at a seeded-random admissible position
    and applies uniform random actions for ``duration`` seconds. Episode
    seeds derive from the master ``seed``, so the whole campaign is one
    deterministic function of its arguments regardless of the pool size.
    """
    if episodes < 1:
        raise ValueError("need at least one episode")
    T = _period(grid)
    n = round(duration / T)
    if n < 1 or abs(n * T - duration) > 1e-9 * max(duration, T):
        raise ValueError("duration must be a positive multiple of the "
                         "decision period")
    master = random.Random(seed)
    ep_seeds = [master.getrandbits(64) for _ in range(episodes)]
    workers = worker_count() if threads is None else threads
    workers = min(workers, episodes)
    if workers <= 1:
        worst_p, worst_v, violations = _episode_batch(
            (ep_seeds, _limit_tuple(L), T, n))
    else:
        chunks = [ep_seeds[k::workers] for k in range(workers)]
        worst_p = worst_v = -math.inf
        violations = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            args = [(chunk, _limit_tuple(L), T, n) for chunk in chunks]
            for wp, wv, bad in pool.map(_episode_batch, args):
                worst_p = max(worst_p, wp)
                worst_v = max(worst_v, wv)
                violations += bad
    return FuzzSummary(
        episodes=episodes,
        f_N=1.0 / T,
        duration=duration,
        seed=seed,
        violations=violations,
        violation_rate=violations / episodes,
        max_norm_position=worst_p,
        max_norm_velocity=worst_v,
    )


def _limit_tuple(L: KinematicLimits) -> tuple:
    return (L.p_min, L.p_max, L.v_min, L.v_max,
            L.a_min, L.a_max, L.j_min, L.j_max)
