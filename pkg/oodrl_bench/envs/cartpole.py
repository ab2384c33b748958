"""Cartpole: balance a pole on a cart by pushing left or right"""

import math
from dataclasses import dataclass

import numpy as np
from pydantic import Field

from ..errors import UsageError
from .base import ActionSpace, Environment, EnvParams, Observation, StepResult

X_THRESHOLD = 2.4
THETA_THRESHOLD = 12 * 2 * math.pi / 360

LEFT, RIGHT = 0, 1
_ACTION_NAMES = {"left": LEFT, "right": RIGHT}


class CartpoleParams(EnvParams):
    gravity: float = Field(9.8, gt=0)
    mass_cart: float = Field(1.0, gt=0)
    pole_half_length: float = Field(0.5, gt=0)
    mass_pole: float = Field(0.1, gt=0)
    force_magnitude: float = Field(10.0, gt=0)
    dt: float = Field(0.02, gt=0)
    max_steps: int = Field(500, ge=1)


@dataclass(frozen=True)
class CartpoleState:
    x: float
    x_dot: float
    theta: float
    theta_dot: float
    steps: int = 0
    done: bool = False

    def observation(self) -> Observation:
        return np.array([self.x, self.x_dot, self.theta, self.theta_dot], dtype=np.float64)


def cartpole_reset(
    params: CartpoleParams, rng: np.random.Generator
) -> tuple[CartpoleState, Observation]:
    """Each state component uniform in [-0.05, 0.05]"""
    x, x_dot, theta, theta_dot = rng.uniform(-0.05, 0.05, size=4)
    state = CartpoleState(float(x), float(x_dot), float(theta), float(theta_dot))
    return state, state.observation()


def cartpole_step(
    state: CartpoleState, action: int | str, params: CartpoleParams
) -> tuple[CartpoleState, StepResult]:
    """Explicit Euler step, position updated with the old velocity

    Raises:
        UsageError: If the state is terminal or the action is not left/right
    """
    if state.done:
        raise UsageError("cartpole_step called on a terminal state")
    if isinstance(action, str):
        action = _ACTION_NAMES.get(action, -1)
    if action not in (LEFT, RIGHT):
        raise UsageError(f"Invalid cartpole action: {action!r}")

    force = params.force_magnitude if action == RIGHT else -params.force_magnitude
    cos_t = math.cos(state.theta)
    sin_t = math.sin(state.theta)
    total_mass = params.mass_cart + params.mass_pole
    pole_mass_length = params.mass_pole * params.pole_half_length

    temp = (force + pole_mass_length * state.theta_dot**2 * sin_t) / total_mass
    theta_acc = (params.gravity * sin_t - cos_t * temp) / (
        params.pole_half_length * (4.0 / 3.0 - params.mass_pole * cos_t**2 / total_mass)
    )
    x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass

    dt = params.dt
    x = state.x + dt * state.x_dot
    x_dot = state.x_dot + dt * x_acc
    theta = state.theta + dt * state.theta_dot
    theta_dot = state.theta_dot + dt * theta_acc
    steps = state.steps + 1

    terminated = bool(abs(x) > X_THRESHOLD or abs(theta) > THETA_THRESHOLD)
    truncated = not terminated and steps >= params.max_steps

    next_state = CartpoleState(x, x_dot, theta, theta_dot, steps, terminated or truncated)
    return next_state, StepResult(next_state.observation(), 1.0, terminated, truncated)


class CartpoleEnv(Environment):
    """Cartpole with every physical parameter settable"""

    env_id = "cartpole"

    def __init__(self, params: CartpoleParams | None = None, variant_id: str | None = None):
        super().__init__(params or CartpoleParams(), variant_id)

    @property
    def observation_dim(self) -> int:
        return 4

    @property
    def action_space(self) -> ActionSpace:
        return ActionSpace(kind="discrete", n=2)

    def _reset(self, rng: np.random.Generator) -> Observation:
        self._state, obs = cartpole_reset(self.params, rng)
        return obs

    def _step(self, action) -> StepResult:
        self._state, result = cartpole_step(self._state, int(action), self.params)
        return result
