"""DDPG: deterministic actor, Q critic on (obs, action), Polyak-averaged targets"""

import logging

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


def actor_spec(obs_dim: int, action_dim: int, bound: float, config: NetworkConfig) -> NetworkSpec:
    """Actor with a tanh output scaled to [-bound, bound] and the configured stochastic layers"""
    return NetworkSpec(
        layer_dims=(obs_dim, *config.hidden_dims, action_dim),
        activations=(config.activation,),
        output_activation="tanh_scaled",
        output_bound=bound,
        stochastic=config.stochastic or "none",
        rate=config.rate,
    )


def critic_spec(obs_dim: int, action_dim: int, config: NetworkConfig) -> NetworkSpec:
    """Critic over ``obs ++ action``; never stochastic"""
    return NetworkSpec(
        layer_dims=(obs_dim + action_dim, *config.hidden_dims, 1),
        activations=(config.activation,),
    )


class DDPGTrainer(BaseTrainer):
    """Deep deterministic policy gradient for a 1-D continuous action

    Exploration adds Gaussian noise with std ``action_noise * bound`` to the
    actor output and clips to the bound. The actor is trained by
    backpropagating ``-mean Q(s, actor(s))`` through the critic into the
    actor, with the actor's masks sampled when it has stochastic layers.
    """

    algorithm = "ddpg"

    def _build(self) -> None:
        space = self.env.action_space
        if space.is_discrete:
            raise ConfigError(
                f"DDPG needs a continuous action space, {self.env.env_id} is discrete"
            )
        self.action_dim = 1
        self.bound = float(space.high)

        self.actor = init_network(
            actor_spec(self.obs_dim, self.action_dim, self.bound, self.network_config),
            self.init_seed(0),
        )
        self.critic = init_network(
            critic_spec(self.obs_dim, self.action_dim, self.network_config), self.init_seed(1)
        )
        self.actor_target = clone_perturb_free(self.actor)
        self.critic_target = clone_perturb_free(self.critic)
        self.actor_opt = AdamState.for_network(self.actor)
        self.critic_opt = AdamState.for_network(self.critic)

    def networks(self) -> dict[str, Network]:
        return {"actor": self.actor, "critic": self.critic}

    def exploration_value(self, step: int) -> float:
        return self.config.action_noise * self.bound

    def explore_action(self, x: np.ndarray, step: int) -> np.ndarray:
        action, _ = forward(self.actor, x)
        noise = self.rngs["explore"].normal(0.0, self.exploration_value(step), size=action.shape)
        return np.clip(action + noise, -self.bound, self.bound)

    def _update_targets(self, step: int) -> None:
        cfg = self.config
        if cfg.target_update == "hard":
            if step % cfg.target_update_every == 0:
                hard_update(self.actor_target, self.actor)
                hard_update(self.critic_target, self.critic)
            return
        soft_update(self.actor_target, self.actor, cfg.tau)
        soft_update(self.critic_target, self.critic, cfg.tau)

    def update(self, step: int) -> float:
        cfg = self.config
        batch = self.buffer.sample(cfg.batch_size, self.rngs["replay"])
        n = cfg.batch_size

        # critic: regress Q(s, a) on r + gamma * Q_t(s', actor_t(s'))
        next_actions, _ = forward(self.actor_target, batch.next_obs)
        next_q, _ = forward(self.critic_target, np.hstack([batch.next_obs, next_actions]))
        targets = batch.rewards + cfg.gamma * (1.0 - batch.terminated) * next_q[:, 0]

        q, critic_tape = forward(self.critic, np.hstack([batch.obs, batch.actions]))
        errors = q[:, 0] - targets
        critic_grads = backward(self.critic, critic_tape, (2.0 * errors / n)[:, None])
        sgd_adam_step(
            self.critic,
            critic_grads.clip_by_global_norm(cfg.grad_clip),
            self.critic_opt,
            cfg.critic_lr,
        )

        # actor: ascend Q(s, actor(s)) through the updated critic
        actor_mode = StochasticMode.sampled(self.rngs["masks"])
        actions, actor_tape = forward(self.actor, batch.obs, actor_mode)
        _, q_tape = forward(self.critic, np.hstack([batch.obs, actions]))
        q_grads = backward(self.critic, q_tape, np.full((n, 1), -1.0 / n))
        action_grad = q_grads.input[:, self.obs_dim :]
        actor_grads = backward(self.actor, actor_tape, action_grad)
        sgd_adam_step(
            self.actor, actor_grads.clip_by_global_norm(cfg.grad_clip), self.actor_opt, cfg.actor_lr
        )

        self._update_targets(step)
        return float(np.mean(errors**2))


def ddpg_train(
    env: Environment,
    network_config: NetworkConfig,
    agent_config: AgentConfig,
    seed: int,
) -> TrainResult:
    """Train actor and critic on ``env``; returns both checkpoints and the learning curve

    Raises:
        ConfigError: For discrete-action environments
        TrainingError: If training diverges
    """
    return DDPGTrainer(env, network_config, agent_config, seed).train()
