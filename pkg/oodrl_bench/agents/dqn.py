"""DQN: epsilon-greedy behaviour, uniform replay, hard-updated target network"""

import logging
from typing import Any

import numpy as np

from ..config import AgentConfig, NetworkConfig
from ..envs import Environment
from ..errors import ConfigError
from ..nncore import (
    AdamState,
    Network,
    NetworkSpec,
    StochasticMode,
    backward,
    clone_perturb_free,
    forward,
    hard_update,
    init_network,
    sgd_adam_step,
    soft_update,
)
from .base import BaseTrainer, TrainResult

logger = logging.getLogger(__name__)


def td_targets(
    rewards: np.ndarray,
    next_q: np.ndarray,
    terminated: np.ndarray,
    gamma: float,
) -> np.ndarray:
    """r + gamma * max_a' Q_target(s', a') * (1 - terminated)

    Args:
        rewards: (B,)
        next_q: (B, n_actions) target-network values of the next observations
        terminated: (B,) 1.0 where the episode ended in a terminal state
        gamma: Discount factor
    """
    next_q = np.asarray(next_q, dtype=np.float64)
    bootstrap = next_q.max(axis=1) * (1.0 - np.asarray(terminated, dtype=np.float64))
    return np.asarray(rewards, dtype=np.float64) + gamma * bootstrap


def linear_epsilon(step: int, start: float, end: float, decay_steps: int) -> float:
    """Epsilon decayed linearly from ``start`` to ``end`` over ``decay_steps``, then held"""
    frac = min(max(step, 0) / decay_steps, 1.0)
    return start + frac * (end - start)


def epsilon_greedy(q_values: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Uniform random action with probability ``epsilon``, else argmax

    Exactly one uniform draw is consumed per call, plus one integer draw when
    exploring.
    """
    q_values = np.asarray(q_values)
    if rng.random() < epsilon:
        return int(rng.integers(q_values.shape[0]))
    return int(np.argmax(q_values))


def q_network_spec(obs_dim: int, n_actions: int, config: NetworkConfig) -> NetworkSpec:
    return NetworkSpec(
        layer_dims=(obs_dim, *config.hidden_dims, n_actions),
        activations=(config.activation,),
        stochastic=config.stochastic or "none",
        rate=config.rate,
    )


class DQNTrainer(BaseTrainer):
    """Deep Q-learning for discrete actions

    Dropout / DropConnect masks are sampled in every update when the network
    has them; action selection during training uses the deterministic network.
    The TD target comes from the target network only.
    """

    algorithm = "dqn"

    def _build(self) -> None:
        space = self.env.action_space
        if not space.is_discrete:
            raise ConfigError(f"DQN needs a discrete action space, {self.env.env_id} is continuous")
        self.n_actions = space.n
        spec = q_network_spec(self.obs_dim, self.n_actions, self.network_config)
        self.q = init_network(spec, self.init_seed(0))
        self.q_target = clone_perturb_free(self.q)
        self.opt = AdamState.for_network(self.q)

    def networks(self) -> dict[str, Network]:
        return {"q": self.q}

    def exploration_value(self, step: int) -> float:
        cfg = self.config
        return linear_epsilon(step, cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_steps)

    def explore_action(self, x: np.ndarray, step: int) -> Any:
        q_values, _ = forward(self.q, x)
        return epsilon_greedy(q_values, self.exploration_value(step), self.rngs["explore"])

    def update(self, step: int) -> float:
        cfg = self.config
        batch = self.buffer.sample(cfg.batch_size, self.rngs["replay"])

        next_q, _ = forward(self.q_target, batch.next_obs)
        targets = td_targets(batch.rewards, next_q, batch.terminated, cfg.gamma)

        q, tape = forward(self.q, batch.obs, StochasticMode.sampled(self.rngs["masks"]))
        rows = np.arange(cfg.batch_size)
        errors = q[rows, batch.actions] - targets
        output_grad = np.zeros_like(q)
        output_grad[rows, batch.actions] = 2.0 * errors / cfg.batch_size

        grads = backward(self.q, tape, output_grad).clip_by_global_norm(cfg.grad_clip)
        sgd_adam_step(self.q, grads, self.opt, cfg.lr)

        if cfg.target_update == "soft":
            soft_update(self.q_target, self.q, cfg.tau)
        elif step % cfg.target_update_every == 0:
            hard_update(self.q_target, self.q)
        return float(np.mean(errors**2))


def dqn_train(
    env: Environment,
    network_config: NetworkConfig,
    agent_config: AgentConfig,
    seed: int,
) -> TrainResult:
    """Train a Q network on ``env``; returns the checkpoint and learning curve

    Raises:
        ConfigError: For continuous-action environments
        TrainingError: If training diverges
    """
    return DQNTrainer(env, network_config, agent_config, seed).train()
