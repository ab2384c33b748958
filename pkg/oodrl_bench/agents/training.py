"""Training the networks of one trial

A trial trains one network (MC Dropout / MC DropConnect) or ``members``
independently seeded networks (ensembles) on the default environment.
"""

import logging
from typing import Callable, Sequence

from ..config import ExperimentConfig
from ..envs import Environment, make_variant
from ..errors import ConfigError
from ..nncore import Checkpoint
from ..utils import member_seed
from .base import TrainResult
from .ddpg import ddpg_train
from .dqn import dqn_train
from .policy import Policy

logger = logging.getLogger(__name__)

TRAINERS: dict[str, Callable[..., TrainResult]] = {"dqn": dqn_train, "ddpg": ddpg_train}


def train_agent(config: ExperimentConfig, seed: int, env: Environment | None = None) -> TrainResult:
    """Train one network (plus critic for DDPG) with ``seed``

    Args:
        config: Experiment config; resolved here if it is not already
        seed: Member seed
        env: Training environment; defaults to the config's default env

    Raises:
        ConfigError: If the algorithm does not fit the environment
        TrainingError: If training diverges
    """
    config = config.resolved()
    algorithm = config.agent.algorithm
    if algorithm not in TRAINERS:
        raise ConfigError(f"Unknown algorithm '{algorithm}'")
    env = env or make_variant(config.env)
    return TRAINERS[algorithm](env, config.network, config.agent, seed)


def train_members(config: ExperimentConfig, seed: int) -> list[TrainResult]:
    """Train every network a trial needs: ``members`` for ensembles, else one

    Example:
        >>> results = train_members(config, trial_seed(config.base_seed, 0))
        >>> policy = policy_from_results(results)
    """
    config = config.resolved()
    results = []
    for m in range(config.n_members):
        logger.info(f"Training member {m + 1}/{config.n_members} of seed {seed}")
        results.append(train_agent(config, member_seed(seed, m)))
    return results


def policy_from_results(results: Sequence[TrainResult]) -> Policy:
    return Policy.from_checkpoints([r.policy_checkpoint for r in results])


def policy_from_checkpoints(checkpoints: Sequence[Checkpoint]) -> Policy:
    """Policy over the acting networks among ``checkpoints`` (critics are skipped)"""
    acting = [c for c in checkpoints if c.metadata.get("role", "q") != "critic"]
    return Policy.from_checkpoints(acting)
