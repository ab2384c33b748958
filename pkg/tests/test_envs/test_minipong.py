"""
Tests for MiniPong
"""

import numpy as np
import pytest

from oodrl_bench.corruptions import CorruptionSpec
from oodrl_bench.envs import MiniPongEnv, MiniPongParams, MiniPongState, render_frame


def _rollout(env, seed, actions):
    frames = [env.reset(np.random.default_rng(seed))]
    rewards = []
    for action in actions:
        result = env.step(action)
        frames.append(result.obs)
        rewards.append(result.reward)
        if result.done:
            break
    return np.stack(frames), rewards


class TestMiniPong:
    """Test MiniPong kinematics and rendering"""

    def test_rendered_frames_are_binary(self):
        """Clean frames only hold 0.0 and 1.0"""
        env = MiniPongEnv()
        frames, _ = _rollout(env, 0, [1, 2, 0] * 30)
        assert set(np.unique(frames)) <= {0.0, 1.0}

    def test_observation_shape(self):
        """Observations stack frame_stack frames"""
        env = MiniPongEnv()
        obs = env.reset(np.random.default_rng(0))
        assert obs.shape == (4, 84, 84)
        assert env.observation_dim == 4 * 84 * 84
        assert env.action_space.n == 3

    def test_same_seed_and_actions_bit_identical(self):
        """Episodes are determined by seed and action sequence"""
        actions = list(np.random.default_rng(5).integers(0, 3, size=300))
        a, ra = _rollout(MiniPongEnv(), 7, actions)
        b, rb = _rollout(MiniPongEnv(), 7, actions)
        assert np.array_equal(a, b)
        assert ra == rb

    def test_corruption_keeps_dynamics(self):
        """A corrupted env follows the same ball trajectory as the clean one"""
        actions = [0] * 100
        clean = MiniPongEnv()
        noisy = MiniPongEnv(corruption=CorruptionSpec.gaussian(0.2))
        _, rc = _rollout(clean, 3, actions)
        _, rn = _rollout(noisy, 3, actions)
        assert rc == rn
        assert clean.state == noisy.state

    def test_corrupted_frames_in_unit_range(self):
        """Corrupted observations stay within [0, 1]"""
        env = MiniPongEnv(corruption=CorruptionSpec.gaussian(0.38))
        frames, _ = _rollout(env, 0, [0] * 20)
        assert frames.min() >= 0.0 and frames.max() <= 1.0
        assert len(np.unique(frames)) > 2

    def test_rewards_are_points(self):
        """Rewards are +1, -1 or 0 and a game ends at max_score"""
        # agent parked at the top misses most balls, so the game ends quickly
        params = MiniPongParams(max_score=3, opponent_skill=0.5)
        env = MiniPongEnv(params)
        env.reset(np.random.default_rng(0))
        result, rewards = None, []
        while result is None or not result.done:
            result = env.step(1)
            rewards.append(result.reward)
        assert set(rewards) <= {-1.0, 0.0, 1.0}
        assert result.terminated
        state = env.state
        assert max(state.agent_score, state.opponent_score) == 3

    def test_paddles_stay_on_screen(self):
        """Paddles are clamped to the frame"""
        params = MiniPongParams()
        env = MiniPongEnv(params)
        env.reset(np.random.default_rng(0))
        for _ in range(100):
            env.step(1)
        assert env.state.agent_y == 0
        for _ in range(100):
            env.step(2)
        assert env.state.agent_y == params.frame_size - params.paddle_len

    @pytest.mark.parametrize("start_row", range(0, 83, 3))
    @pytest.mark.parametrize("paddle_start", [0, 72])
    def test_perfect_opponent_returns_straight_shots(self, start_row, paddle_start):
        """With skill 1 and ball speed 1 the opponent never concedes a straight shot"""
        params = MiniPongParams(opponent_skill=1.0, ball_speed=1)
        env = MiniPongEnv(params)
        env.reset(np.random.default_rng(0))
        env.set_state(
            MiniPongState(
                ball_x=params.frame_size // 2,
                ball_y=start_row,
                ball_vx=-1,
                ball_vy=0,
                agent_y=0,
                opponent_y=paddle_start,
            )
        )
        for _ in range(params.frame_size):
            result = env.step(0)
            assert result.reward != 1.0
            if env.state.ball_vx > 0:
                break
        assert env.state.ball_vx > 0

    def test_render_places_ball(self):
        """The ball is a 2x2 block at its top-left pixel"""
        params = MiniPongParams()
        state = MiniPongState(40, 30, 1, 0, agent_y=0, opponent_y=0)
        frame = render_frame(state, params)
        assert frame[30:32, 40:42].sum() == 4.0
        assert frame[:, 2:4].sum() == 2 * params.paddle_len
