"""Core types and exact interval kinematics for jerk-limited joint control.

A joint is controlled by acceleration setpoints issued at a fixed decision
frequency. Between consecutive setpoints the acceleration is linearly
interpolated, so jerk is piecewise constant and position, velocity and
acceleration have exact closed-form values everywhere inside an interval.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .roots import solve_quadratic


class InadmissibleStateError(ValueError):
    """State lies outside the position/velocity/acceleration limits."""


class InfeasibleStateError(ValueError):
    """No acceleration setpoint keeps the joint inside its limits."""


@dataclass(frozen=True, slots=True)
class KinematicLimits:
    """Box limits on position, velocity, acceleration and jerk.

    Attributes:
        p_min, p_max: position bounds, p_min < p_max.
        v_min, v_max: velocity bounds, v_min < 0 < v_max.
        a_min, a_max: acceleration bounds, a_min < 0 < a_max.
        j_min, j_max: jerk bounds, j_min < 0 < j_max.
    """

    p_min: float
    p_max: float
    v_min: float
    v_max: float
    a_min: float
    a_max: float
    j_min: float
    j_max: float

    def __post_init__(self) -> None:
        vals = (self.p_min, self.p_max, self.v_min, self.v_max,
                self.a_min, self.a_max, self.j_min, self.j_max)
        if not all(math.isfinite(x) for x in vals):
            raise ValueError("limits must be finite")
        if not self.p_min < self.p_max:
            raise ValueError("require p_min < p_max")
        if not self.v_min < 0.0 < self.v_max:
            raise ValueError("require v_min < 0 < v_max")
        if not self.a_min < 0.0 < self.a_max:
            raise ValueError("require a_min < 0 < a_max")
        if not self.j_min < 0.0 < self.j_max:
            raise ValueError("require j_min < 0 < j_max")


@dataclass(frozen=True, slots=True)
class JointState:
    """Instantaneous kinematic state (position, velocity, acceleration)."""

    p: float
    v: float
    a: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and math.isfinite(self.v)
                and math.isfinite(self.a)):
            raise ValueError("state must be finite")


@dataclass(frozen=True, slots=True)
class DecisionGrid:
    """Uniform decision-step grid at frequency ``f_N`` (period ``T``)."""

    f_N: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.f_N) and self.f_N > 0.0):
            raise ValueError("decision frequency must be positive and finite")

    @property
    def T(self) -> float:
        return 1.0 / self.f_N


@dataclass(frozen=True, slots=True)
class AccelerationRange:
    """Closed interval of admissible next acceleration setpoints."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("range bounds must be finite")
        if self.lo > self.hi:
            raise ValueError("require lo <= hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo


def admissible(s: JointState, L: KinematicLimits) -> bool:
    """Whether the state lies inside the position/velocity/acceleration box."""
    return (L.p_min <= s.p <= L.p_max
            and L.v_min <= s.v <= L.v_max
            and L.a_min <= s.a <= L.a_max)


def mirror(s: JointState, L: KinematicLimits) -> tuple[JointState, KinematicLimits]:
    """Reflect a state and its limits through the origin.

    Negates the state and swaps-and-negates each limit pair, so lower-bound
    questions on the original become upper-bound questions on the image.
    The transform is an involution.
    """
    sm = JointState(-s.p, -s.v, -s.a)
    lm = KinematicLimits(
        p_min=-L.p_max, p_max=-L.p_min,
        v_min=-L.v_max, v_max=-L.v_min,
        a_min=-L.a_max, a_max=-L.a_min,
        j_min=-L.j_max, j_max=-L.j_min,
    )
    return sm, lm


def map_action(rng: AccelerationRange, m: float) -> float:
    """Affine map from a normalized action m in [-1, 1] onto the range.

    m = -1 selects ``rng.lo``, m = +1 selects ``rng.hi``. Out-of-range
    actions are clamped (a warning is emitted); NaN or infinite actions are
    rejected.
    """
    if not math.isfinite(m):
        raise ValueError("non-finite action")
    if m < -1.0 or m > 1.0:
        warnings.warn("action outside [-1, 1], clamped", stacklevel=2)
        m = -1.0 if m < -1.0 else 1.0
    return rng.lo + 0.5 * (1.0 + m) * (rng.hi - rng.lo)


def step_interval(p: float, v: float, a: float, a_next: float,
                  T: float) -> tuple[float, float, float]:
    """Exact state after one interval with linearly interpolated acceleration.

    Plain-float core of :func:`integrate_interval`, shared by the hot paths.
    """
    j = (a_next - a) / T
    p1 = p + v * T + 0.5 * a * T * T + j * T * T * T / 6.0
    v1 = v + a * T + 0.5 * j * T * T
    return p1, v1, a_next


def integrate_interval(s: JointState, a_next: float, T: float) -> JointState:
    """Roll the state exactly across one decision interval.

    The acceleration ramps linearly from ``s.a`` to ``a_next`` over ``T``
    (constant jerk), so the update is polynomial and exact:

        j  = (a_next - a) / T
        a' = a_next
        v' = v + a T + j T^2 / 2
        p' = p + v T + a T^2 / 2 + j T^3 / 6
    """
    if not (math.isfinite(a_next) and math.isfinite(T)) or T <= 0.0:
        raise ValueError("require finite a_next and T > 0")
    p1, v1, a1 = step_interval(s.p, s.v, s.a, a_next, T)
    return JointState(p1, v1, a1)


def sample_interval(s: JointState, a_next: float, T: float,
                    n_sub: int = 16) -> list[tuple[float, float, float, float]]:
    """Dense samples ``(t, p, v, a)`` inside one interval, endpoints included.

    ``n_sub`` uniform sub-steps; samples are evaluated in closed form, not
    by numeric integration.
    """
    if n_sub < 1:
        raise ValueError("n_sub must be >= 1")
    j = (a_next - s.a) / T
    out = []
    for k in range(n_sub + 1):
        t = T * k / n_sub
        a = s.a + j * t
        v = s.v + s.a * t + 0.5 * j * t * t
        p = s.p + s.v * t + 0.5 * s.a * t * t + j * t * t * t / 6.0
        out.append((t, p, v, a))
    return out


@dataclass(frozen=True, slots=True)
class Trajectory:
    """A rolled-out trajectory on a decision grid.

    ``states`` holds the decision-step states (length n+1 for n intervals);
    ``setpoints`` the applied acceleration targets; ``actions`` the raw
    normalized actions; ``ranges`` the safe range at each step, kept so the
    admissible band can be plotted alongside the trajectory.
    """

    grid: DecisionGrid
    states: list[JointState] = field(default_factory=list)
    setpoints: list[float] = field(default_factory=list)
    actions: list[float] = field(default_factory=list)
    ranges: list[AccelerationRange] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = len(self.setpoints)
        if len(self.states) != n + 1:
            raise ValueError("need exactly one more state than setpoints")
        if len(self.actions) not in (0, n) or len(self.ranges) not in (0, n):
            raise ValueError("actions/ranges must be empty or match setpoints")

    @property
    def duration(self) -> float:
        return self.grid.T * len(self.setpoints)

    def jerks(self) -> list[float]:
        T = self.grid.T
        return [(self.setpoints[i] - self.states[i].a) / T
                for i in range(len(self.setpoints))]


@dataclass(frozen=True, slots=True)
class QuantityReport:
    """Worst-case summary for one limited quantity along a trajectory.

    ``worst`` is the peak normalized value: 1.0 means exactly at a limit,
    values above 1.0 are violations, the excess beyond 1.0 is the signed
    excess divided by the limit magnitude.
    """

    worst: float
    count: int
    first_t: float | None


@dataclass(frozen=True, slots=True)
class ViolationReport:
    """Per-quantity violation summary produced by :func:`check_limits`."""

    position: QuantityReport
    velocity: QuantityReport
    acceleration: QuantityReport
    jerk: QuantityReport

    @property
    def ok(self) -> bool:
        return (self.position.count == 0 and self.velocity.count == 0
                and self.acceleration.count == 0 and self.jerk.count == 0)

    @property
    def total_violations(self) -> int:
        return (self.position.count + self.velocity.count
                + self.acceleration.count + self.jerk.count)


class _Acc:
    # Mutable accumulator for one quantity.
    __slots__ = ("lo", "hi", "scale", "tol", "worst", "count", "first_t")

    def __init__(self, lo: float, hi: float, tol: float):
        self.lo = lo
        self.hi = hi
        self.scale = max(abs(lo), abs(hi))
        self.tol = tol
        self.worst = -math.inf
        self.count = 0
        self.first_t = None

    def add(self, t: float, x: float) -> None:
        excess = max(x - self.hi, self.lo - x) / self.scale
        norm = 1.0 + excess
        if norm > self.worst:
            self.worst = norm
        if excess > self.tol:
            self.count += 1
            if self.first_t is None:
                self.first_t = t

    def report(self) -> QuantityReport:
        return QuantityReport(self.worst, self.count, self.first_t)


def check_limits(traj: Trajectory, L: KinematicLimits, tol: float = 1e-9,
                 n_sub: int = 16) -> ViolationReport:
    """Scan a trajectory densely against all four limit pairs.

    Each interval is sampled at ``n_sub`` uniform points plus the interior
    extrema that sampling can miss: the velocity extremum where the linear
    acceleration crosses zero, and position extrema where the quadratic
    velocity crosses zero. Jerk is constant per interval and checked once.
    ``tol`` is relative to each limit's magnitude.
    """
    if not traj.setpoints:
        raise ValueError("empty trajectory")
    T = traj.grid.T
    pos = _Acc(L.p_min, L.p_max, tol)
    vel = _Acc(L.v_min, L.v_max, tol)
    acc = _Acc(L.a_min, L.a_max, tol)
    jrk = _Acc(L.j_min, L.j_max, tol)

    for i, a_next in enumerate(traj.setpoints):
        s = traj.states[i]
        t0 = i * T
        j = (a_next - s.a) / T
        jrk.add(t0, j)
        interior: list[float] = []
        if j != 0.0:
            ta = -s.a / j
            if 0.0 < ta < T:
                interior.append(ta)
        # p-extrema at v(t) = 0 (v is quadratic in t).
        for tv in solve_quadratic(s.v, s.a, 0.5 * j):
            if 0.0 < tv < T:
                interior.append(tv)
        ts = [T * k / n_sub for k in range(n_sub + 1)]
        ts.extend(interior)
        for t in ts:
            a = s.a + j * t
            v = s.v + s.a * t + 0.5 * j * t * t
            p = s.p + s.v * t + 0.5 * s.a * t * t + j * t * t * t / 6.0
            pos.add(t0 + t, p)
            vel.add(t0 + t, v)
            acc.add(t0 + t, a)
    return ViolationReport(pos.report(), vel.report(), acc.report(),
                           jrk.report())
