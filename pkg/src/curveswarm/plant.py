"""Double-integrator agents with exact zero-order-hold updates."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .quaternion import ZERO, Vec3

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentState:
    id: int
    x: Vec3
    v: Vec3 = ZERO
    failed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "x", Vec3(*map(float, self.x)))
        object.__setattr__(self, "v", Vec3(*map(float, self.v)))


@dataclass(frozen=True)
class DisturbanceConfig:
    enabled: bool = False
    sigma_a: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_a >= 0:
            raise ValueError(f"sigma_a must be >= 0, got {self.sigma_a}")


class Disturbance:
    """Seeded zero-mean Gaussian acceleration, independent per axis per draw."""

    def __init__(self, config: DisturbanceConfig):
        self.config = config
        self._rng = np.random.Generator(np.random.PCG64(config.seed))

    def draw(self) -> Vec3:
        if not self.config.enabled or self.config.sigma_a == 0.0:
            return ZERO
        w = self._rng.normal(0.0, self.config.sigma_a, 3)
        return Vec3(float(w[0]), float(w[1]), float(w[2]))


def clamp_norm(u: Vec3, u_max: float | None) -> Vec3:
    if u_max is None:
        return u
    n = u.norm()
    if n <= u_max:
        return u
    return u * (u_max / n)


def step(state: AgentState, u, dt: float, w=ZERO) -> AgentState:
    """Advance one agent by ``dt`` under constant acceleration ``u + w``.

    A non-finite command does not raise: the agent is returned marked as
    failed with its kinematics frozen, so a run can continue without it.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if state.failed:
        return state
    if not all(math.isfinite(c) for c in u):
        logger.warning("agent %d: non-finite command %s, marking failed", state.id, tuple(u))
        return replace(state, failed=True)
    ax, ay, az = u[0] + w[0], u[1] + w[1], u[2] + w[2]
    x, v = state.x, state.v
    h = 0.5 * dt * dt
    return AgentState(
        state.id,
        Vec3(x[0] + v[0] * dt + ax * h, x[1] + v[1] * dt + ay * h, x[2] + v[2] * dt + az * h),
        Vec3(v[0] + ax * dt, v[1] + ay * dt, v[2] + az * dt),
    )
