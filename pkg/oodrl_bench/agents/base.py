"""
Base Trainer

Abstract base class for the RL trainers.
"""

import copy
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..config import AgentConfig, NetworkConfig
from ..envs import Environment, MiniPongEnv
from ..errors import TrainingError
from ..nncore import Checkpoint, Network, clone_perturb_free, hard_update
from ..utils import derive_seed, spawn_rngs
from .encoding import encode_observation, encoded_dim
from .policy import Policy
from .replay import ReplayBuffer, Transition
from .rollout import rollout

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["episode", "return", "epsilon", "loss_mean"]

# optimizer steps skipped for non-finite gradients before a run counts as diverged
MAX_SKIPPED_UPDATES = 100


@dataclass
class TrainResult:
    """Checkpoints, learning curve and statistics of one training run"""

    checkpoints: dict[str, Checkpoint]
    curve: list[dict[str, float]] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def policy_checkpoint(self) -> Checkpoint:
        """The network that acts: Q network (DQN) or actor (DDPG)"""
        return self.checkpoints["q"] if "q" in self.checkpoints else self.checkpoints["actor"]


class BaseTrainer(ABC):
    """Abstract trainer

    All trainers must implement:
    - _build(): create networks and optimizer state
    - explore_action(): behaviour action for an encoded observation
    - exploration_value(): epsilon or action-noise std at a step (for the curve)
    - update(): one gradient step from replay, returning the loss
    - networks(): online networks by role, in checkpoint order
    - policy(): greedy policy over the current networks

    The base class handles:
    - The environment loop and replay insertion
    - Skipped / diverged updates
    - Periodic greedy evaluation, keeping the best snapshot
    - Learning curve and statistics

    Example:
        >>> trainer = DQNTrainer(CartpoleEnv(), network_config, agent_config, seed=0)
        >>> result = trainer.train()
        >>> result.curve[-1]["return"]
    """

    algorithm: str = ""

    def __init__(
        self,
        env: Environment,
        network_config: NetworkConfig,
        agent_config: AgentConfig,
        seed: int,
    ):
        """Initialize trainer

        Args:
            env: Training environment (owned by the trainer)
            network_config: Resolved network configuration
            agent_config: Resolved agent configuration
            seed: Seed for initialization, exploration, replay and masks
        """
        self.env = env
        self.eval_env = copy.deepcopy(env)
        self.network_config = network_config
        self.config = agent_config
        self.seed = int(seed)
        self.rngs = spawn_rngs(self.seed, ("env", "explore", "replay", "masks", "eval"))

        self.obs_dim = encoded_dim(env)
        action_dim = 0 if env.action_space.is_discrete else 1
        obs_dtype = np.float16 if isinstance(env, MiniPongEnv) else np.float64
        self.buffer = ReplayBuffer(
            agent_config.buffer_capacity, self.obs_dim, action_dim, obs_dtype
        )

        self.curve: list[dict[str, float]] = []
        self.stats: dict[str, Any] = {
            "steps": 0,
            "episodes": 0,
            "updates": 0,
            "skipped_updates": 0,
            "best_eval_return": None,
            "final_eval_return": None,
        }
        self._best: Optional[dict[str, Network]] = None

        self._build()
        logger.info(
            f"{self.algorithm} trainer initialized: env={env.variant_id}, seed={self.seed}, "
            f"obs_dim={self.obs_dim}, stochastic={network_config.stochastic}"
        )

    def init_seed(self, role_index: int = 0) -> int:
        """Initialization seed of the ``role_index``-th network"""
        return self.seed if role_index == 0 else derive_seed(self.seed, 1000 + role_index)

    @abstractmethod
    def _build(self) -> None:
        """Create networks, target networks and optimizer states"""

    @abstractmethod
    def explore_action(self, x: np.ndarray, step: int) -> Any:
        """Behaviour action for the encoded observation ``x`` at global step ``step``"""

    @abstractmethod
    def exploration_value(self, step: int) -> float:
        """Epsilon (DQN) or action-noise std (DDPG) at ``step``"""

    @abstractmethod
    def update(self, step: int) -> float:
        """One optimization step from replay; returns the TD loss"""

    @abstractmethod
    def networks(self) -> dict[str, Network]:
        """Online networks by role"""

    def policy(self) -> Policy:
        nets = self.networks()
        if "q" in nets:
            return Policy([nets["q"]], discrete=True)
        return Policy([nets["actor"]], discrete=False)

    def _safe_update(self, step: int) -> Optional[float]:
        try:
            loss = self.update(step)
        except TrainingError as e:
            self.stats["skipped_updates"] += 1
            logger.warning(f"{self.env.variant_id}: update skipped at step {step}: {e}")
            if self.stats["skipped_updates"] > MAX_SKIPPED_UPDATES:
                raise TrainingError(
                    f"Training diverged: {self.stats['skipped_updates']} updates skipped"
                ) from e
            return None

        if not math.isfinite(loss) or not all(n.is_finite() for n in self.networks().values()):
            raise TrainingError(f"Training diverged at step {step}: non-finite loss or weights")
        self.stats["updates"] += 1
        return loss

    def evaluate(self, episodes: int) -> float:
        """Mean greedy return on a copy of the training environment"""
        episodes_run = rollout(self.policy(), self.eval_env, episodes, self.rngs["eval"])
        return float(np.mean([e.total_return for e in episodes_run]))

    def _keep_best(self, step: int) -> None:
        mean_return = self.evaluate(self.config.eval_episodes)
        best = self.stats["best_eval_return"]
        logger.info(f"{self.env.variant_id}: step {step} greedy return {mean_return:.1f}")
        if best is None or mean_return >= best:
            self.stats["best_eval_return"] = mean_return
            self._best = {role: clone_perturb_free(net) for role, net in self.networks().items()}

    def _restore_best(self) -> None:
        if self._best is None:
            return
        for role, net in self.networks().items():
            hard_update(net, self._best[role])

    def train(self) -> TrainResult:
        """Run ``train_steps`` environment steps

        Returns:
            TrainResult with one checkpoint per online network

        Raises:
            TrainingError: If the run diverges
        """
        cfg = self.config
        total_steps = int(cfg.train_steps)
        logger.info(
            f"Starting {self.algorithm} training: {total_steps} steps on {self.env.variant_id}"
        )

        x = encode_observation(self.env.reset(self.rngs["env"]))
        episode_return, losses = 0.0, []
        for step in range(1, total_steps + 1):
            action = self.explore_action(x, step)
            result = self.env.step(action)
            next_x = encode_observation(result.obs)
            self.buffer.push(Transition(x, action, result.reward, next_x, result.terminated))
            episode_return += result.reward

            if step > cfg.learning_starts and len(self.buffer) >= cfg.batch_size:
                loss = self._safe_update(step)
                if loss is not None:
                    losses.append(loss)

            if result.done:
                self.curve.append(
                    {
                        "episode": len(self.curve),
                        "return": float(episode_return),
                        "epsilon": float(self.exploration_value(step)),
                        "loss_mean": float(np.mean(losses)) if losses else float("nan"),
                    }
                )
                if len(self.curve) % 20 == 0:
                    logger.info(
                        f"{self.env.variant_id}: episode {len(self.curve)}, step {step}, "
                        f"return {episode_return:.1f}"
                    )
                x = encode_observation(self.env.reset(self.rngs["env"]))
                episode_return, losses = 0.0, []
            else:
                x = next_x

            if cfg.eval_every and step % cfg.eval_every == 0:
                self._keep_best(step)

        if cfg.eval_every:
            if total_steps % cfg.eval_every:
                self._keep_best(total_steps)
            self._restore_best()
            self.stats["final_eval_return"] = self.stats["best_eval_return"]

        self.stats["steps"] = total_steps
        self.stats["episodes"] = len(self.curve)
        logger.info(f"{self.algorithm} training completed: {self.stats}")
        return TrainResult(
            checkpoints=self.checkpoints(), curve=list(self.curve), stats=dict(self.stats)
        )

    def checkpoints(self) -> dict[str, Checkpoint]:
        metadata = {
            "algorithm": self.algorithm,
            "env": self.env.env_id,
            "variant": self.env.variant_id,
            "train_steps": int(self.config.train_steps),
            "episodes": len(self.curve),
            "best_eval_return": self.stats["best_eval_return"],
        }
        return {
            role: Checkpoint(
                network=clone_perturb_free(net), seed=self.seed, metadata={**metadata, "role": role}
            )
            for role, net in self.networks().items()
        }
