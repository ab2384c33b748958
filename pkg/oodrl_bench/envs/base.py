"""
Base Environment

Abstract base class for the benchmark tasks. Each task keeps its physics in
pure ``<task>_reset`` / ``<task>_step`` functions over an immutable state;
the environment classes own the current state and the rng stream.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import UsageError

# Vector observations are 1-D arrays; pixel observations are
# (frame_stack, frame_size, frame_size) arrays with values in [0, 1].
Observation = np.ndarray


class EnvParams(BaseModel):
    """Base for physical / geometry parameter sets

    Subclasses declare every parameter with its default and bounds.
    Instances are immutable; variants are built with ``make_variant``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")


@dataclass(frozen=True)
class StepResult:
    """Outcome of one environment step"""

    obs: Observation
    reward: float
    terminated: bool
    truncated: bool

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated


@dataclass(frozen=True)
class ActionSpace:
    """Discrete actions ``0..n-1`` or a 1-D continuous box ``[low, high]``"""

    kind: Literal["discrete", "continuous"]
    n: int = 0
    low: float = 0.0
    high: float = 0.0

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"


class Environment(ABC):
    """Abstract environment

    All environments must implement:
    - reset(): start an episode from an rng stream
    - step(): advance one timestep
    - observation_dim / action_space

    Example:
        >>> env = CartpoleEnv()
        >>> obs = env.reset(np.random.default_rng(0))
        >>> result = env.step(1)
        >>> result.reward
        1.0
    """

    env_id: str = ""

    def __init__(self, params: EnvParams, variant_id: Optional[str] = None):
        self.params = params
        self.variant_id = variant_id or self.env_id
        self._rng: Optional[np.random.Generator] = None
        self._state: Any = None
        self._episode_done = True

    @property
    @abstractmethod
    def observation_dim(self) -> int:
        """Length of the flattened observation"""

    @property
    @abstractmethod
    def action_space(self) -> ActionSpace:
        """Action space description"""

    @abstractmethod
    def _reset(self, rng: np.random.Generator) -> Observation:
        pass

    @abstractmethod
    def _step(self, action: Any) -> StepResult:
        pass

    @property
    def state(self) -> Any:
        return self._state

    def reset(self, rng: np.random.Generator) -> Observation:
        """Start a new episode; ``rng`` is owned by the environment until the next reset"""
        self._rng = rng
        obs = self._reset(rng)
        self._episode_done = False
        return obs

    def step(self, action: Any) -> StepResult:
        """Advance one step

        Raises:
            UsageError: If called before reset or after the episode ended
        """
        if self._episode_done:
            raise UsageError(f"{self.variant_id}: step() called on a finished or unstarted episode")
        result = self._step(action)
        self._episode_done = result.done
        return result

    def __repr__(self) -> str:
        return f"{type(self).__name__}(variant_id={self.variant_id!r}, params={self.params!r})"
