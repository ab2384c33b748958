"""Running a policy through whole episodes"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..envs import Environment
from .policy import Policy


@dataclass
class Episode:
    """Everything one episode produced

    ``observations[t]`` is the observation the action ``actions[t]`` was
    chosen from; ``outputs[t]`` the member-mean network output at that step.
    """

    observations: list[np.ndarray] = field(default_factory=list)
    actions: list[Any] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    outputs: list[np.ndarray] = field(default_factory=list)
    terminated: bool = False
    truncated: bool = False

    @property
    def length(self) -> int:
        return len(self.rewards)

    @property
    def total_return(self) -> float:
        return float(sum(self.rewards))


def run_episode(
    policy: Policy,
    env: Environment,
    rng: np.random.Generator,
    mask_rng: Optional[np.random.Generator] = None,
) -> Episode:
    """One episode from ``env.reset(rng)``

    Args:
        mask_rng: When given, stochastic layers sample masks while acting
    """
    episode = Episode()
    obs = env.reset(rng)
    while True:
        action, output = policy.act(obs, mask_rng)
        result = env.step(action)
        episode.observations.append(obs)
        episode.actions.append(action)
        episode.rewards.append(float(result.reward))
        episode.outputs.append(output)
        if result.done:
            episode.terminated = result.terminated
            episode.truncated = result.truncated
            return episode
        obs = result.obs


def rollout(
    policy: Policy,
    env: Environment,
    episodes: int,
    rng: np.random.Generator,
    greedy: bool = True,
) -> list[Episode]:
    """Run exactly ``episodes`` episodes

    Greedy rollouts never sample masks, so a fixed checkpoint and rng seed
    reproduce the same episodes bit for bit. Non-greedy rollouts act with
    sampled masks drawn from a stream split off ``rng``.

    Example:
        >>> episodes = rollout(policy, make_env("cartpole"), 10, np.random.default_rng(0))
        >>> [e.total_return for e in episodes]
    """
    mask_rng = None if greedy else np.random.default_rng(int(rng.integers(0, 2**63 - 1)))
    return [run_episode(policy, env, rng, mask_rng) for _ in range(int(episodes))]
