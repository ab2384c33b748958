"""Pendulum swing-up with a continuous torque"""

import math
from dataclasses import dataclass

import numpy as np
from pydantic import Field

from ..errors import ShapeError
from .base import ActionSpace, Environment, EnvParams, Observation, StepResult


class PendulumParams(EnvParams):
    gravity: float = Field(10.0, gt=0)
    mass: float = Field(1.0, gt=0)
    length: float = Field(1.0, gt=0)
    max_speed: float = Field(8.0, gt=0)
    max_torque: float = Field(2.0, gt=0)
    dt: float = Field(0.05, gt=0)
    max_steps: int = Field(200, ge=1)


@dataclass(frozen=True)
class PendulumState:
    theta: float
    theta_dot: float
    steps: int = 0

    def observation(self) -> Observation:
        return np.array(
            [math.cos(self.theta), math.sin(self.theta), self.theta_dot], dtype=np.float64
        )


def wrap_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)"""
    return ((theta + math.pi) % (2 * math.pi)) - math.pi


def exact_sin(theta: float) -> float:
    """Sine of the wrapped angle, exactly zero at the hanging position"""
    wrapped = wrap_angle(theta)
    if wrapped == -math.pi:
        return 0.0
    return math.sin(wrapped)


def pendulum_reset(
    params: PendulumParams, rng: np.random.Generator
) -> tuple[PendulumState, Observation]:
    theta = float(rng.uniform(-math.pi, math.pi))
    theta_dot = float(rng.uniform(-1.0, 1.0))
    state = PendulumState(theta, theta_dot)
    return state, state.observation()


def pendulum_step(
    state: PendulumState, torque: float, params: PendulumParams
) -> tuple[PendulumState, StepResult]:
    """Velocity-then-position Euler step; the cost uses the pre-step state

    The episode is truncated after ``max_steps`` and never terminates.
    """
    raw = float(np.asarray(torque, dtype=np.float64).reshape(-1)[0])
    if not math.isfinite(raw):
        raise ShapeError(f"Torque must be finite, got {raw}")
    u = min(max(raw, -params.max_torque), params.max_torque)
    g, m, length, dt = params.gravity, params.mass, params.length, params.dt

    cost = wrap_angle(state.theta) ** 2 + 0.1 * state.theta_dot**2 + 0.001 * u**2

    theta_dot = state.theta_dot + (
        3.0 * g / (2.0 * length) * exact_sin(state.theta) + 3.0 / (m * length**2) * u
    ) * dt
    theta_dot = float(np.clip(theta_dot, -params.max_speed, params.max_speed))
    theta = state.theta + theta_dot * dt
    steps = state.steps + 1

    next_state = PendulumState(theta, theta_dot, steps)
    return next_state, StepResult(next_state.observation(), -cost, False, steps >= params.max_steps)


class PendulumEnv(Environment):
    """Pendulum with every physical parameter settable"""

    env_id = "pendulum"

    def __init__(self, params: PendulumParams | None = None, variant_id: str | None = None):
        super().__init__(params or PendulumParams(), variant_id)

    @property
    def observation_dim(self) -> int:
        return 3

    @property
    def action_space(self) -> ActionSpace:
        torque = self.params.max_torque
        return ActionSpace(kind="continuous", low=-torque, high=torque)

    def _reset(self, rng: np.random.Generator) -> Observation:
        self._state, obs = pendulum_reset(self.params, rng)
        return obs

    def _step(self, action) -> StepResult:
        self._state, result = pendulum_step(self._state, action, self.params)
        return result
