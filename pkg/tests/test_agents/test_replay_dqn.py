"""
Tests for replay, observation encoding and the DQN building blocks
"""

import math

import numpy as np
import pytest

from oodrl_bench.agents import (
    ReplayBuffer,
    Transition,
    encode_observation,
    encoded_dim,
    epsilon_greedy,
    linear_epsilon,
    td_targets,
)
from oodrl_bench.envs import CartpoleEnv, MiniPongEnv
from oodrl_bench.errors import ShapeError


def _transition(i: int, obs_dim: int = 3) -> Transition:
    obs = np.full(obs_dim, float(i))
    return Transition(obs=obs, action=i % 2, reward=float(i), next_obs=obs + 1, terminated=False)


class TestReplayBuffer:
    """Test the ring buffer"""

    def test_never_exceeds_capacity(self):
        """Size saturates at capacity"""
        buffer = ReplayBuffer(capacity=5, obs_dim=3)
        for i in range(12):
            buffer.push(_transition(i))
            assert len(buffer) == min(i + 1, 5)
        assert buffer.total_pushed == 12

    def test_oldest_evicted(self):
        """After capacity + k inserts the first k transitions are gone"""
        buffer = ReplayBuffer(capacity=4, obs_dim=3)
        for i in range(7):
            buffer.push(_transition(i))

        rewards = [t.reward for t in buffer.contents()]
        assert rewards == [3.0, 4.0, 5.0, 6.0]

    def test_contents_before_wrap(self):
        """Contents are in insertion order before the ring wraps"""
        buffer = ReplayBuffer(capacity=10, obs_dim=3)
        for i in range(3):
            buffer.push(_transition(i))
        assert [t.action for t in buffer.contents()] == [0, 1, 0]

    def test_sample_only_current_contents(self, rng):
        """Samples are drawn from stored transitions only"""
        buffer = ReplayBuffer(capacity=4, obs_dim=3)
        for i in range(10):
            buffer.push(_transition(i))

        batch = buffer.sample(200, rng)
        assert batch.obs.shape == (200, 3)
        assert set(batch.rewards.tolist()) <= {6.0, 7.0, 8.0, 9.0}
        assert batch.obs.dtype == np.float64

    def test_sample_is_roughly_uniform(self, rng):
        """Every slot is drawn with frequency 1/size"""
        buffer = ReplayBuffer(capacity=4, obs_dim=1)
        for i in range(4):
            buffer.push(_transition(i, obs_dim=1))

        n = 20_000
        rewards = buffer.sample(n, rng).rewards
        band = 4 * math.sqrt(0.25 * 0.75 / n)
        for value in range(4):
            assert abs(np.mean(rewards == value) - 0.25) < band

    def test_continuous_actions(self):
        """Continuous buffers store action vectors"""
        buffer = ReplayBuffer(capacity=3, obs_dim=2, action_dim=1)
        buffer.push(Transition(np.zeros(2), np.array([0.7]), 1.0, np.ones(2), True))
        stored = buffer.contents()[0]
        assert stored.action.tolist() == [0.7]
        assert stored.terminated is True

    def test_width_mismatch(self):
        """Observations of the wrong width are rejected"""
        buffer = ReplayBuffer(capacity=3, obs_dim=4)
        with pytest.raises(ShapeError):
            buffer.push(_transition(0, obs_dim=3))

    def test_empty_sample(self, rng):
        """Sampling an empty buffer fails"""
        with pytest.raises(ValueError):
            ReplayBuffer(capacity=3, obs_dim=2).sample(4, rng)


class TestEncoding:
    """Test observation encoding"""

    def test_vector_passthrough(self):
        """Vector observations are unchanged"""
        obs = np.array([0.1, -0.2, 0.3, 0.0])
        np.testing.assert_array_equal(encode_observation(obs), obs)

    def test_pixel_block_mean(self):
        """4x4 blocks are averaged"""
        frames = np.zeros((1, 8, 8))
        frames[0, :4, :4] = 1.0
        frames[0, 4:, 4:] = 0.5
        np.testing.assert_allclose(encode_observation(frames), [1.0, 0.0, 0.0, 0.5])

    def test_encoded_dims(self):
        """Encoded widths match the environment"""
        assert encoded_dim(CartpoleEnv()) == 4
        env = MiniPongEnv()
        obs = env.reset(np.random.default_rng(0))
        assert encode_observation(obs).shape == (encoded_dim(env),)

    def test_bad_rank(self):
        """2-D observations are rejected"""
        with pytest.raises(ShapeError):
            encode_observation(np.zeros((4, 4)))


class TestDQNParts:
    """Test TD targets and exploration"""

    def test_terminal_target_is_reward(self):
        """gamma=0 on a terminal transition gives the reward exactly"""
        targets = td_targets(np.array([0.37]), np.array([[5.0, 9.0]]), np.array([1.0]), gamma=0.0)
        assert targets[0] == 0.37

    def test_bootstrap_uses_max(self):
        """Non-terminal targets add gamma * max next Q"""
        targets = td_targets(
            np.array([1.0, 1.0]),
            np.array([[2.0, 4.0], [3.0, -1.0]]),
            np.array([0.0, 1.0]),
            gamma=0.5,
        )
        np.testing.assert_allclose(targets, [3.0, 1.0])

    def test_linear_epsilon(self):
        """Epsilon decays linearly then holds"""
        assert linear_epsilon(0, 1.0, 0.05, 100) == 1.0
        assert linear_epsilon(50, 1.0, 0.05, 100) == pytest.approx(0.525)
        assert linear_epsilon(100, 1.0, 0.05, 100) == pytest.approx(0.05)
        assert linear_epsilon(10_000, 1.0, 0.05, 100) == pytest.approx(0.05)

    def test_epsilon_one_is_uniform(self, rng):
        """With epsilon 1 every action is equally likely"""
        q = np.array([5.0, 0.0, 0.0, 0.0])
        n = 10_000
        counts = np.bincount([epsilon_greedy(q, 1.0, rng) for _ in range(n)], minlength=4)
        band = 4 * math.sqrt(0.25 * 0.75 / n)
        for count in counts:
            assert abs(count / n - 0.25) < band

    def test_epsilon_zero_is_greedy(self, rng):
        """With epsilon 0 the argmax is always taken"""
        q = np.array([0.0, 2.0, 1.0])
        assert {epsilon_greedy(q, 0.0, rng) for _ in range(100)} == {1}
