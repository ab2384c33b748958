"""DQN and DDPG trainers, policies, rollouts and the failure search"""

from .base import CURVE_COLUMNS, BaseTrainer, TrainResult
from .ddpg import DDPGTrainer, actor_spec, critic_spec, ddpg_train
from .dqn import DQNTrainer, dqn_train, epsilon_greedy, linear_epsilon, q_network_spec, td_targets
from .encoding import encode_observation, encoded_dim
from .failure import (
    RETURN_COLUMNS,
    FailureRule,
    VariantReturn,
    evaluate_variants,
    find_failing_variants,
)
from .policy import Policy
from .replay import Batch, ReplayBuffer, Transition
from .rollout import Episode, rollout, run_episode
from .training import policy_from_checkpoints, policy_from_results, train_agent, train_members

__all__ = [
    "BaseTrainer",
    "Batch",
    "CURVE_COLUMNS",
    "DDPGTrainer",
    "DQNTrainer",
    "Episode",
    "FailureRule",
    "Policy",
    "RETURN_COLUMNS",
    "ReplayBuffer",
    "TrainResult",
    "Transition",
    "VariantReturn",
    "actor_spec",
    "critic_spec",
    "ddpg_train",
    "dqn_train",
    "encode_observation",
    "encoded_dim",
    "epsilon_greedy",
    "evaluate_variants",
    "find_failing_variants",
    "linear_epsilon",
    "policy_from_checkpoints",
    "policy_from_results",
    "q_network_spec",
    "rollout",
    "run_episode",
    "td_targets",
    "train_agent",
    "train_members",
]
