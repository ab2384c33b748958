"""Cartpole, Pendulum and MiniPong with settable physics, plus the variant registry"""

from .base import ActionSpace, Environment, EnvParams, Observation, StepResult
from .cartpole import (
    CartpoleEnv,
    CartpoleParams,
    CartpoleState,
    cartpole_reset,
    cartpole_step,
)
from .minipong import (
    MiniPongEnv,
    MiniPongParams,
    MiniPongState,
    minipong_reset,
    minipong_step,
    render_frame,
)
from .pendulum import (
    PendulumEnv,
    PendulumParams,
    PendulumState,
    exact_sin,
    pendulum_reset,
    pendulum_step,
    wrap_angle,
)
from .registry import (
    ENV_IDS,
    PRESET_GRIDS,
    VariantSpec,
    canonical_param,
    list_presets,
    make_env,
    make_params,
    make_variant,
    preset_grid,
    resolve_variant,
)

__all__ = [
    "ActionSpace",
    "CartpoleEnv",
    "CartpoleParams",
    "CartpoleState",
    "ENV_IDS",
    "Environment",
    "EnvParams",
    "MiniPongEnv",
    "MiniPongParams",
    "MiniPongState",
    "Observation",
    "PRESET_GRIDS",
    "PendulumEnv",
    "PendulumParams",
    "PendulumState",
    "StepResult",
    "VariantSpec",
    "canonical_param",
    "cartpole_reset",
    "cartpole_step",
    "exact_sin",
    "list_presets",
    "make_env",
    "make_params",
    "make_variant",
    "minipong_reset",
    "minipong_step",
    "pendulum_reset",
    "pendulum_step",
    "preset_grid",
    "render_frame",
    "resolve_variant",
    "wrap_angle",
]
