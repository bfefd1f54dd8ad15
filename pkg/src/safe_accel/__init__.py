"""Exact safe acceleration-setpoint ranges for jerk-limited joint control."""

from .core import (
    AccelerationRange,
    DecisionGrid,
    InadmissibleStateError,
    InfeasibleStateError,
    JointState,
    KinematicLimits,
    Trajectory,
    ViolationReport,
    admissible,
    check_limits,
    integrate_interval,
    map_action,
    mirror,
    sample_interval,
)

__all__ = [
    "AccelerationRange",
    "DecisionGrid",
    "InadmissibleStateError",
    "InfeasibleStateError",
    "JointState",
    "KinematicLimits",
    "Trajectory",
    "ViolationReport",
    "admissible",
    "check_limits",
    "integrate_interval",
    "map_action",
    "mirror",
    "sample_interval",
    "safe_acceleration_range",
    "translate_range",
]


def __getattr__(name):
    if name in ("safe_acceleration_range", "translate_range"):
        from . import saferange
        return getattr(saferange, name)
    raise AttributeError(name)
