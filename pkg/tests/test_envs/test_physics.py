"""
Tests for Cartpole and Pendulum dynamics
"""

import math

import numpy as np
import pytest

from oodrl_bench.envs import (
    CartpoleEnv,
    CartpoleParams,
    CartpoleState,
    PendulumEnv,
    PendulumParams,
    PendulumState,
    cartpole_reset,
    cartpole_step,
    pendulum_reset,
    pendulum_step,
    exact_sin,
    wrap_angle,
)
from oodrl_bench.errors import ShapeError, UsageError


class TestCartpole:
    """Test cartpole reset and step"""

    def test_reset_deterministic(self):
        """Same rng seed gives the same reset state"""
        a, _ = cartpole_reset(CartpoleParams(), np.random.default_rng(3))
        b, _ = cartpole_reset(CartpoleParams(), np.random.default_rng(3))
        assert a == b

    def test_reset_range_and_mean(self):
        """10^4 resets stay in [-0.05, 0.05] with mean near 0"""
        rng = np.random.default_rng(0)
        params = CartpoleParams()
        obs = np.stack([cartpole_reset(params, rng)[1] for _ in range(10_000)])
        assert np.all(np.abs(obs) <= 0.05)
        se = 0.1 / np.sqrt(12) / np.sqrt(len(obs))
        assert np.all(np.abs(obs.mean(axis=0)) < 4 * se)

    def test_step_from_rest_push_right(self):
        """(0, 0, 0, 0) pushed right gives (0, 0.19512, 0, -0.29268)"""
        state, result = cartpole_step(CartpoleState(0.0, 0.0, 0.0, 0.0), "right", CartpoleParams())
        np.testing.assert_allclose(result.obs, [0.0, 0.19512, 0.0, -0.29268], atol=1e-4)
        assert result.reward == 1.0
        assert not result.terminated and not result.truncated
        assert state.steps == 1

    def test_zero_gravity_upright_no_angular_push_from_gravity(self):
        """At theta = 0 gravity contributes nothing to the angular acceleration"""
        params = CartpoleParams(gravity=1e-9)
        _, a = cartpole_step(CartpoleState(0.0, 0.0, 0.0, 0.0), 1, params)
        _, b = cartpole_step(CartpoleState(0.0, 0.0, 0.0, 0.0), 1, CartpoleParams())
        np.testing.assert_allclose(a.obs, b.obs, atol=1e-12)

    def test_out_of_bounds_terminates(self):
        """x = 2.5 after the update terminates with reward 1"""
        _, result = cartpole_step(CartpoleState(2.5, 0.0, 0.0, 0.0), 0, CartpoleParams())
        assert result.terminated
        assert result.reward == 1.0

    def test_angle_threshold_exact(self):
        """Termination happens strictly beyond 12 degrees"""
        limit = 12 * math.pi / 180
        _, inside = cartpole_step(CartpoleState(0.0, 0.0, limit, 0.0), 0, CartpoleParams())
        _, outside = cartpole_step(CartpoleState(0.0, 0.0, limit + 1e-9, 0.0), 0, CartpoleParams())
        assert not inside.terminated
        assert outside.terminated

    def test_terminal_state_step_is_usage_error(self):
        """Stepping a finished state is rejected"""
        with pytest.raises(UsageError):
            cartpole_step(CartpoleState(0, 0, 0, 0, done=True), 0, CartpoleParams())

    def test_invalid_action(self):
        """Only left/right are accepted"""
        with pytest.raises(UsageError):
            cartpole_step(CartpoleState(0, 0, 0, 0), 2, CartpoleParams())

    def test_return_equals_length_and_truncation(self):
        """Reward is exactly the number of steps survived; episodes stop by 500"""
        env = CartpoleEnv()
        env.reset(np.random.default_rng(0))
        total, steps, result = 0.0, 0, None
        while result is None or not result.done:
            # simple balancing controller
            state = env.state
            result = env.step(1 if state.theta + 0.5 * state.theta_dot > 0 else 0)
            total += result.reward
            steps += 1
        assert total == steps
        assert steps <= 500
        assert result.terminated != result.truncated

    def test_env_rejects_step_after_done(self):
        """Environment refuses to step a finished episode"""
        env = CartpoleEnv()
        env.reset(np.random.default_rng(0))
        result = env.step(0)
        while not result.done:
            result = env.step(0)
        with pytest.raises(UsageError):
            env.step(0)

    def test_nonpositive_params_rejected(self):
        """Physical parameters must be strictly positive"""
        with pytest.raises(ValueError):
            CartpoleParams(gravity=0.0)


class TestPendulum:
    """Test pendulum reset and step"""

    def test_upright_equilibrium(self):
        """theta = 0, theta_dot = 0, u = 0 keeps the state with reward 0"""
        state, result = pendulum_step(PendulumState(0.0, 0.0), 0.0, PendulumParams())
        assert state.theta == 0.0 and state.theta_dot == 0.0
        assert result.reward == 0.0

    def test_hanging_equilibrium(self):
        """theta = pi stays exactly at rest with reward -pi^2"""
        for theta in (math.pi, -math.pi):
            state, result = pendulum_step(PendulumState(theta, 0.0), 0.0, PendulumParams())
            assert state.theta == theta
            assert state.theta_dot == 0.0
            assert result.reward == -(math.pi**2)

    def test_exact_sin(self):
        """Zero at the hanging position, plain sine elsewhere"""
        assert exact_sin(math.pi) == 0.0
        assert exact_sin(-math.pi) == 0.0
        assert exact_sin(0.0) == 0.0
        assert exact_sin(0.7) == pytest.approx(math.sin(0.7), abs=1e-15)

    @pytest.mark.parametrize("torque", [math.nan, math.inf, -math.inf])
    def test_non_finite_torque_rejected(self, torque):
        """NaN and infinite torques raise instead of entering the state"""
        with pytest.raises(ShapeError):
            pendulum_step(PendulumState(0.3, 0.1), torque, PendulumParams())

    def test_non_finite_array_action_rejected(self):
        env = PendulumEnv()
        env.reset(np.random.default_rng(0))
        with pytest.raises(ShapeError):
            env.step(np.array([np.nan]))

    def test_torque_clamped(self):
        """u = 100 behaves exactly like u = max_torque"""
        params = PendulumParams()
        a, ra = pendulum_step(PendulumState(0.3, 0.1), 100.0, params)
        b, rb = pendulum_step(PendulumState(0.3, 0.1), 2.0, params)
        assert a == b
        assert ra.reward == rb.reward

    def test_accepts_array_action(self):
        """1-D actions from an actor network are accepted"""
        params = PendulumParams()
        a, _ = pendulum_step(PendulumState(0.3, 0.1), np.array([0.5]), params)
        b, _ = pendulum_step(PendulumState(0.3, 0.1), 0.5, params)
        assert a == b

    def test_speed_and_torque_bounds_hold(self):
        """|theta_dot| <= max_speed after every step for arbitrary inputs"""
        rng = np.random.default_rng(0)
        params = PendulumParams(max_speed=4.0)
        state, _ = pendulum_reset(params, rng)
        for _ in range(500):
            state, result = pendulum_step(state, float(rng.normal(scale=50)), params)
            assert abs(state.theta_dot) <= params.max_speed
            assert np.all(np.isfinite(result.obs))
            if state.steps >= params.max_steps:
                state = PendulumState(state.theta, state.theta_dot)

    def test_reward_uses_wrapped_angle(self):
        """The angle cost uses theta wrapped into [-pi, pi]"""
        params = PendulumParams()
        _, a = pendulum_step(PendulumState(0.5 + 4 * math.pi, 0.0), 0.0, params)
        _, b = pendulum_step(PendulumState(0.5, 0.0), 0.0, params)
        assert a.reward == pytest.approx(b.reward, abs=1e-12)
        assert -math.pi <= wrap_angle(123.4) <= math.pi

    def test_reset_ranges(self):
        """Reset draws theta in [-pi, pi] and theta_dot in [-1, 1]"""
        rng = np.random.default_rng(1)
        for _ in range(1000):
            state, obs = pendulum_reset(PendulumParams(), rng)
            assert -math.pi <= state.theta <= math.pi
            assert -1.0 <= state.theta_dot <= 1.0
            assert obs.shape == (3,)

    def test_truncated_after_200_never_terminated(self):
        """Episodes truncate at 200 steps"""
        env = PendulumEnv()
        env.reset(np.random.default_rng(0))
        for i in range(200):
            result = env.step(0.0)
            assert not result.terminated
        assert result.truncated
        assert env.action_space.high == 2.0
