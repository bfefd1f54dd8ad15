"""Shared fixtures for the safe_accel test suite."""

import pytest

from safe_accel.core import (
    DecisionGrid,
    JointState,
    KinematicLimits,
    integrate_interval,
    map_action,
)
from safe_accel.saferange import safe_acceleration_range


def make_limits(p=2.9, v=1.9, a=5.0, j=25.0) -> KinematicLimits:
    """Symmetric limit box; defaults match the packaged joint config."""
    return KinematicLimits(-p, p, -v, v, -a, a, -j, j)


def random_reachable(rng, L, T, burn=8):
    """A state produced by the safety layer itself from a random rest start."""
    s = JointState(rng.uniform(0.4 * L.p_min, 0.4 * L.p_max), 0.0, 0.0)
    for _ in range(burn):
        r = safe_acceleration_range(s, L, T)
        s = integrate_interval(s, map_action(r, rng.uniform(-1.0, 1.0)), T)
    return s


@pytest.fixture
def std_limits() -> KinematicLimits:
    return make_limits()


@pytest.fixture
def grid_10hz() -> DecisionGrid:
    return DecisionGrid(10.0)
