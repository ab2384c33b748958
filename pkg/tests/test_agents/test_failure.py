"""
Tests for the failure search over environment variants
"""

import math

import pytest

from oodrl_bench.agents import (
    FailureRule,
    Policy,
    evaluate_variants,
    find_failing_variants,
    q_network_spec,
)
from oodrl_bench.config import NetworkConfig
from oodrl_bench.envs import resolve_variant
from oodrl_bench.errors import ConfigError
from oodrl_bench.nncore import init_network


@pytest.fixture
def policy():
    spec = q_network_spec(4, 2, NetworkConfig(hidden_dims=[8]))
    return Policy([init_network(spec, 0)], discrete=True)


class TestFailureRule:
    """Test thresholds"""

    def test_cartpole_half_baseline(self):
        """Cartpole fails below half the baseline return"""
        rule = FailureRule.for_env("cartpole")
        assert rule.threshold(400.0) == 200.0
        assert rule.is_failing(199.0, 400.0)
        assert not rule.is_failing(200.0, 400.0)

    def test_pendulum_twice_negative_baseline(self):
        """Pendulum fails below twice the (negative) baseline return"""
        rule = FailureRule.for_env("pendulum")
        assert rule.threshold(-150.0) == -300.0
        assert rule.is_failing(-301.0, -150.0)
        assert not rule.is_failing(-250.0, -150.0)

    def test_minipong_losing(self):
        """MiniPong fails when the mean score is negative"""
        rule = FailureRule.for_env("minipong")
        assert rule.is_failing(-0.1, 5.0)
        assert not rule.is_failing(0.0, 5.0)

    def test_minus_infinity_never_fails(self):
        """An absolute threshold of -inf marks nothing as failing"""
        rule = FailureRule(absolute=-math.inf)
        assert not rule.is_failing(-1e12, 0.0)

    @pytest.mark.parametrize("kwargs", [{}, {"factor": 0.5, "absolute": 0.0}])
    def test_needs_exactly_one(self, kwargs):
        """Exactly one of factor and absolute is set"""
        with pytest.raises(ConfigError):
            FailureRule(**kwargs)

    def test_unknown_env(self):
        """Unknown environments have no default rule"""
        with pytest.raises(ConfigError):
            FailureRule.for_env("mountaincar")


class TestEvaluateVariants:
    """Test variant evaluation"""

    def test_baseline_first(self, policy):
        """The default environment is the first row"""
        rows = evaluate_variants(
            policy, "cartpole", ["cartpole/length/2", "cartpole/gravity/98"], episodes=2, seed=0
        )
        assert [r.variant for r in rows] == ["cartpole", "cartpole/length/2", "cartpole/gravity/98"]
        assert rows[0].is_baseline and not rows[1].is_baseline
        assert all(r.episodes == 2 for r in rows)

    def test_default_equivalent_variant_not_failing(self, policy):
        """A variant with default physics matches the baseline exactly"""
        rows = evaluate_variants(policy, "cartpole", ["cartpole/gravity/9.8"], episodes=3, seed=4)
        assert rows[1].mean_return == rows[0].mean_return
        assert not rows[1].failing

    def test_accepts_resolved_specs(self, policy):
        """Resolved variant specs work like ids"""
        spec = resolve_variant("cartpole/mass_pole/0.5")
        rows = evaluate_variants(policy, "cartpole", [spec], episodes=1, seed=0)
        assert rows[1].variant == "cartpole/mass_pole/0.5"

    def test_find_failing_with_custom_rule(self, policy):
        """Every variant fails under an unreachable threshold; none under -inf"""
        variants = ["cartpole/length/2", "cartpole/force/50"]
        failing = find_failing_variants(
            policy, "cartpole", variants, episodes=1, seed=0, rule=FailureRule(absolute=1e9)
        )
        assert failing == variants

        failing = find_failing_variants(
            policy, "cartpole", variants, episodes=1, seed=0, rule=FailureRule(absolute=-math.inf)
        )
        assert failing == []

    def test_empty_variant_list(self, policy):
        """An empty variant list is a config error"""
        with pytest.raises(ConfigError):
            find_failing_variants(policy, "cartpole", [], episodes=1, seed=0)

    def test_foreign_variant(self, policy):
        """Variants of another environment are rejected"""
        with pytest.raises(ConfigError):
            evaluate_variants(policy, "cartpole", ["pendulum/mass/2"], episodes=1, seed=0)
