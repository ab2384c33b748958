"""
Pytest configuration and fixtures
"""

import shutil
import tempfile

import numpy as np
import pytest

from oodrl_bench.config import ExperimentConfig


@pytest.fixture
def temp_dir():
    """Create temporary directory for tests"""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    # Cleanup
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def rng():
    """Fixed-seed generator"""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_cartpole_config(temp_dir):
    """Cartpole experiment small enough to train inside a unit test"""
    return ExperimentConfig(
        env="cartpole",
        variants=["cartpole/length/2"],
        network={"hidden_dims": [16, 16]},
        agent={
            "train_steps": 300,
            "learning_starts": 64,
            "batch_size": 16,
            "buffer_capacity": 1000,
            "target_update_every": 100,
            "epsilon_decay_steps": 200,
            "eval_every": 0,
        },
        uncertainty={"method": "ensemble", "members": 2},
        evaluation={"trials": 2, "episodes_per_side": 1, "failure_episodes": 1},
        base_seed=11,
        output_dir=temp_dir,
    )


@pytest.fixture
def tiny_pendulum_config(temp_dir):
    """Pendulum DDPG experiment small enough to train inside a unit test"""
    return ExperimentConfig(
        env="pendulum",
        variants=["pendulum/mass/2"],
        network={"hidden_dims": [16, 16]},
        agent={
            "train_steps": 250,
            "learning_starts": 64,
            "batch_size": 16,
            "buffer_capacity": 1000,
            "eval_every": 0,
        },
        uncertainty={"method": "mc_dropout", "samples": 3},
        evaluation={"trials": 1, "episodes_per_side": 1, "failure_episodes": 1},
        base_seed=5,
        output_dir=temp_dir,
    )


@pytest.fixture
def tiny_minipong_config(temp_dir):
    """MiniPong DQN ensemble on one corrupted variant, a few hundred steps"""
    return ExperimentConfig(
        env="minipong",
        variants=["minipong/gaussian/3"],
        network={"hidden_dims": [16]},
        agent={
            "train_steps": 200,
            "learning_starts": 64,
            "batch_size": 16,
            "buffer_capacity": 1000,
            "target_update_every": 100,
            "epsilon_decay_steps": 150,
            "eval_every": 0,
        },
        uncertainty={"method": "ensemble", "members": 2},
        evaluation={"trials": 1, "episodes_per_side": 1, "failure_episodes": 1},
        base_seed=3,
        output_dir=temp_dir,
    )
