"""
Tests for MC and ensemble uncertainty scores
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oodrl_bench.config import UncertaintyConfig
from oodrl_bench.errors import MethodError, SpecError
from oodrl_bench.nncore import Checkpoint, Network, NetworkSpec, init_network
from oodrl_bench.uncertainty import (
    AGGREGATIONS,
    UncertaintyMethod,
    aggregate_std,
    check_compatible,
    ensemble_score,
    mc_score,
    score_observation,
    step_score,
)


class _ConstantUniforms:
    """Mask stream that keeps every unit"""

    def random(self, shape):
        return np.zeros(shape)


def _constant_net(value: float, outputs: int = 2) -> Network:
    """Network whose output is ``value`` for every action, whatever the input"""
    spec = NetworkSpec(layer_dims=(3, outputs))
    return Network(spec, weights=[np.zeros((outputs, 3))], biases=[np.full(outputs, value)])


def _bernoulli_unit(rate: float) -> Network:
    """x -> identity hidden unit with dropout -> identity output, unit weights"""
    spec = NetworkSpec(
        layer_dims=(1, 1, 1), activations=("identity",), stochastic="dropout", rate=rate
    )
    ones = np.ones((1, 1))
    return Network(spec, weights=[ones, ones.copy()], biases=[np.zeros(1), np.zeros(1)])


@pytest.fixture
def dropout_net():
    spec = NetworkSpec(layer_dims=(3, 16, 2), stochastic="dropout", rate=0.2)
    return init_network(spec, 0)


@pytest.fixture
def x():
    return np.array([0.3, -0.1, 0.5])


class TestUncertaintyMethod:
    """Test method validation"""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "bootstrap"},
            {"kind": "mc_dropout", "samples": 1},
            {"kind": "ensemble", "members": 1},
            {"kind": "ensemble", "aggregation": "median"},
        ],
    )
    def test_invalid(self, kwargs):
        """Bad kinds, counts and aggregations are rejected"""
        with pytest.raises(MethodError):
            UncertaintyMethod(**kwargs)

    def test_from_config(self):
        """Config fields carry over"""
        method = UncertaintyMethod.from_config(
            UncertaintyConfig(method="mc_dropconnect", samples=7, aggregation="max_action_std")
        )
        assert method.kind == "mc_dropconnect"
        assert method.samples == 7
        assert method.aggregation == "max_action_std"
        assert method.is_mc


class TestMcScore:
    """Test MC Dropout / DropConnect scoring"""

    @pytest.mark.parametrize("stochastic", ["dropout", "dropconnect"])
    def test_rate_zero_gives_zero_std(self, stochastic, x, rng):
        """Without drops every pass is identical"""
        net = init_network(NetworkSpec(layer_dims=(3, 8, 2), stochastic=stochastic, rate=0.0), 1)
        _, std = mc_score(net, x, samples=10, rng=rng)
        assert np.all(std == 0.0)

    def test_identical_masks_give_zero_std(self, dropout_net, x):
        """A mask stream that keeps everything gives std exactly 0"""
        mean, std = mc_score(dropout_net, x, samples=5, rng=_ConstantUniforms())
        assert np.all(std == 0.0)
        assert mean.shape == (2,)

    def test_bernoulli_std(self):
        """One dropped unit has std sqrt(rate / (1 - rate))"""
        rate = 0.2
        _, std = mc_score(_bernoulli_unit(rate), np.array([1.0]), samples=20_000,
                          rng=np.random.default_rng(0))
        assert std[0] == pytest.approx(math.sqrt(rate / (1 - rate)), rel=0.03)

    def test_more_samples_shrink_mean_variance(self, dropout_net, x):
        """Variance of the MC mean falls roughly as 1/K"""
        rng = np.random.default_rng(3)
        means_10 = [mc_score(dropout_net, x, 10, rng)[0][0] for _ in range(200)]
        means_100 = [mc_score(dropout_net, x, 100, rng)[0][0] for _ in range(200)]
        ratio = np.var(means_10) / np.var(means_100)
        assert 5.0 < ratio < 20.0

    def test_stream_relabeling(self, dropout_net, x):
        """Different seeds give statistically equal mean scores"""
        def mean_score(seed):
            return mc_score(dropout_net, x, 5, np.random.default_rng(seed))[1][0]

        a = [mean_score(s) for s in range(300)]
        b = [mean_score(10_000 + s) for s in range(300)]
        se = math.sqrt(np.var(a, ddof=1) / 300 + np.var(b, ddof=1) / 300)
        assert abs(np.mean(a) - np.mean(b)) < 4 * se

    def test_needs_stochastic_layers(self, x, rng):
        """Plain networks cannot be MC-scored"""
        with pytest.raises(MethodError):
            mc_score(_constant_net(1.0), x, samples=5, rng=rng)

    def test_accepts_checkpoint(self, dropout_net, x):
        """Checkpoints are unwrapped"""
        a = mc_score(Checkpoint(dropout_net, seed=0), x, 4, np.random.default_rng(2))
        b = mc_score(dropout_net, x, 4, np.random.default_rng(2))
        np.testing.assert_array_equal(a[1], b[1])


class TestEnsembleScore:
    """Test ensemble disagreement"""

    def test_identical_members(self, x):
        """Identical members have std 0"""
        _, std = ensemble_score([_constant_net(0.7) for _ in range(5)], x)
        assert np.all(std == 0.0)

    def test_two_point(self, x):
        """Outputs 0 and 2 give mean 1 and std sqrt(2)"""
        mean, std = ensemble_score([_constant_net(0.0), _constant_net(2.0)], x)
        np.testing.assert_allclose(mean, [1.0, 1.0])
        np.testing.assert_allclose(std, [math.sqrt(2.0)] * 2)

    @settings(max_examples=30, deadline=None)
    @given(seeds=st.lists(st.integers(0, 10_000), min_size=2, max_size=6, unique=True),
           perm_seed=st.integers(0, 1000))
    def test_permutation_invariant(self, seeds, perm_seed):
        """Member order does not change the result"""
        spec = NetworkSpec(layer_dims=(3, 8, 2))
        nets = [init_network(spec, s) for s in seeds]
        shuffled = list(np.random.default_rng(perm_seed).permutation(len(nets)))
        x = np.array([0.2, 0.4, -0.6])
        a = ensemble_score(nets, x)
        b = ensemble_score([nets[i] for i in shuffled], x)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    def test_single_member(self, x):
        """One member is not an ensemble"""
        with pytest.raises(MethodError):
            ensemble_score([_constant_net(0.0)], x)

    def test_mismatched_outputs(self, x):
        """Members must share output widths"""
        with pytest.raises(SpecError):
            ensemble_score([_constant_net(0.0, 2), _constant_net(0.0, 3)], x)


class TestStepScore:
    """Test scalar scores"""

    def test_aggregations(self):
        """Chosen action follows the mean-Q argmax"""
        mean, std = np.array([1.0, 0.5]), np.array([0.1, 0.7])
        assert aggregate_std(mean, std, "chosen_action_std", True) == 0.1
        assert aggregate_std(mean, std, "max_action_std", True) == 0.7
        assert aggregate_std(mean, std, "mean_action_std", True) == pytest.approx(0.4)

    def test_continuous_uses_actor_std(self):
        """Continuous control ignores the aggregation"""
        assert aggregate_std(np.array([0.3]), np.array([0.25]), "max_action_std", False) == 0.25

    @pytest.mark.parametrize("aggregation", AGGREGATIONS)
    def test_identical_ensemble_scores_zero(self, aggregation, x):
        """Identical members score 0 under every aggregation"""
        method = UncertaintyMethod("ensemble", members=3, aggregation=aggregation)
        assert step_score(method, [_constant_net(1.5) for _ in range(3)], x) == 0.0

    def test_pendulum_rate_zero(self, rng):
        """An actor with rate-0 dropout scores 0"""
        spec = NetworkSpec(
            layer_dims=(3, 8, 1),
            output_activation="tanh_scaled",
            output_bound=2.0,
            stochastic="dropout",
            rate=0.0,
        )
        method = UncertaintyMethod("mc_dropout", samples=5)
        actor = init_network(spec, 0)
        result = score_observation(method, [actor], np.zeros(3), rng, discrete=False)
        assert result.score == 0.0
        assert abs(float(result.action[0])) <= 2.0

    def test_chosen_action(self, x):
        """The action is the argmax of the mean output"""
        net_a = Network(NetworkSpec(layer_dims=(3, 2)), [np.zeros((2, 3))], [np.array([0.0, 1.0])])
        net_b = Network(NetworkSpec(layer_dims=(3, 2)), [np.zeros((2, 3))], [np.array([0.0, 3.0])])
        result = score_observation(UncertaintyMethod("ensemble", members=2), [net_a, net_b], x)
        assert result.action == 1
        assert result.score == pytest.approx(math.sqrt(2.0))

    def test_scores_nonnegative(self, dropout_net, rng):
        """Scores are finite and never negative"""
        method = UncertaintyMethod("mc_dropout", samples=3)
        for _ in range(50):
            score = step_score(method, [dropout_net], rng.normal(size=3), rng)
            assert score >= 0.0 and math.isfinite(score)


class TestCheckCompatible:
    """Test method / model matching"""

    def test_dropout_pairs(self, dropout_net):
        """MC Dropout accepts dropout networks only"""
        check_compatible(UncertaintyMethod("mc_dropout"), [dropout_net])
        with pytest.raises(MethodError):
            check_compatible(UncertaintyMethod("mc_dropconnect"), [dropout_net])

    def test_mc_needs_one_network(self, dropout_net):
        """MC methods score a single network"""
        with pytest.raises(MethodError):
            check_compatible(UncertaintyMethod("mc_dropout"), [dropout_net, dropout_net])

    def test_ensemble_needs_two(self):
        """Ensembles need at least two members"""
        method = UncertaintyMethod("ensemble", members=2)
        check_compatible(method, [_constant_net(0), _constant_net(1)])
        with pytest.raises(MethodError):
            check_compatible(UncertaintyMethod("ensemble"), [_constant_net(0)])
