"""
Tests for Adam updates and checkpoint IO
"""

import numpy as np
import pytest

from oodrl_bench.errors import CheckpointError, TrainingError
from oodrl_bench.nncore import (
    AdamState,
    Checkpoint,
    Gradients,
    NetworkSpec,
    StochasticMode,
    backward,
    checkpoint_from_bytes,
    checkpoint_to_bytes,
    forward,
    init_network,
    load_checkpoint,
    save_checkpoint,
    sgd_adam_step,
)


def _grads_like(net, value):
    return Gradients(
        weights=[np.full_like(w, value) for w in net.weights],
        biases=[np.full_like(b, value) for b in net.biases],
        input=np.zeros(net.spec.input_dim),
    )


class TestAdam:
    """Test the Adam step"""

    def test_zero_gradients_leave_parameters(self):
        """Zero gradients change nothing"""
        net = init_network(NetworkSpec(layer_dims=(3, 4, 2)), seed=0)
        before = [p.copy() for p in net.parameters()]
        sgd_adam_step(net, _grads_like(net, 0.0), AdamState.for_network(net), lr=1e-2)
        for p, b in zip(net.parameters(), before):
            np.testing.assert_array_equal(p, b)

    def test_first_step_magnitude_is_lr(self):
        """The bias-corrected first step moves each parameter by about -lr * sign(g)"""
        net = init_network(NetworkSpec(layer_dims=(3, 4, 2)), seed=0)
        before = [p.copy() for p in net.parameters()]
        rng = np.random.default_rng(0)
        grads = Gradients(
            weights=[rng.normal(size=w.shape) for w in net.weights],
            biases=[rng.normal(size=b.shape) for b in net.biases],
            input=np.zeros(3),
        )
        sgd_adam_step(net, grads, AdamState(), lr=1e-3)
        for p, b, g in zip(net.parameters(), before, grads.arrays()):
            np.testing.assert_allclose(p - b, -1e-3 * np.sign(g), rtol=1e-4)

    def test_deterministic(self):
        """Identical nets and gradients give identical updated nets"""
        spec = NetworkSpec(layer_dims=(3, 4, 2))
        a, b = init_network(spec, seed=1), init_network(spec, seed=1)
        sa, sb = AdamState.for_network(a), AdamState.for_network(b)
        for _ in range(3):
            sgd_adam_step(a, _grads_like(a, 0.3), sa, lr=1e-2)
            sgd_adam_step(b, _grads_like(b, 0.3), sb, lr=1e-2)
        for pa, pb in zip(a.parameters(), b.parameters()):
            np.testing.assert_array_equal(pa, pb)
        assert sa.t == 3

    def test_non_finite_gradient_skips_step(self):
        """Non-finite gradients raise TrainingError and modify nothing"""
        net = init_network(NetworkSpec(layer_dims=(3, 2)), seed=0)
        before = [p.copy() for p in net.parameters()]
        state = AdamState.for_network(net)
        with pytest.raises(TrainingError):
            sgd_adam_step(net, _grads_like(net, np.nan), state, lr=1e-2)
        for p, b in zip(net.parameters(), before):
            np.testing.assert_array_equal(p, b)
        assert state.t == 0

    def test_step_descends_quadratic(self):
        """Repeated steps reduce a simple squared-error loss"""
        net = init_network(NetworkSpec(layer_dims=(2, 8, 1), activations=("tanh",)), seed=0)
        state = AdamState.for_network(net)
        x = np.array([[0.5, -0.5], [1.0, 1.0]])
        y = np.array([[1.0], [-1.0]])

        def loss_and_grads():
            out, tape = forward(net, x)
            return float(np.mean((out - y) ** 2)), backward(net, tape, 2 * (out - y) / len(x))

        first, grads = loss_and_grads()
        for _ in range(200):
            sgd_adam_step(net, grads, state, lr=1e-2)
            loss, grads = loss_and_grads()
        assert loss < first


class TestCheckpoint:
    """Test the ORLB checkpoint format"""

    @pytest.fixture
    def checkpoint(self):
        spec = NetworkSpec(
            layer_dims=(4, 16, 2), activations=("relu",), stochastic="dropout", rate=0.1
        )
        return Checkpoint(network=init_network(spec, seed=3), seed=3, metadata={"algorithm": "dqn"})

    def test_header_layout(self, checkpoint):
        """File starts with magic, version 1 and the header length"""
        data = checkpoint_to_bytes(checkpoint)
        assert data[:4] == b"ORLB"
        assert int.from_bytes(data[4:8], "little") == 1
        header_len = int.from_bytes(data[8:12], "little")
        payload = len(data) - 12 - header_len
        assert payload == 4 * (4 * 16 + 16 + 16 * 2 + 2)

    def test_load_restores_float32_values(self, checkpoint, tmp_path):
        """Loaded parameters equal the float32-rounded originals"""
        path = save_checkpoint(tmp_path / "member_00.orlb", checkpoint)
        loaded = load_checkpoint(path)
        assert loaded.spec == checkpoint.spec
        assert loaded.seed == 3
        assert loaded.metadata == {"algorithm": "dqn"}
        for a, b in zip(loaded.network.parameters(), checkpoint.network.parameters()):
            np.testing.assert_array_equal(a, b.astype(np.float32).astype(np.float64))

    def test_bytes_are_reproducible(self, checkpoint):
        """The same network always serializes to the same bytes"""
        assert checkpoint_to_bytes(checkpoint) == checkpoint_to_bytes(checkpoint)

    def test_loaded_network_is_usable(self, checkpoint):
        """A loaded network runs forward in both modes"""
        loaded = checkpoint_from_bytes(checkpoint_to_bytes(checkpoint))
        mode = StochasticMode.sampled(np.random.default_rng(0))
        out, _ = forward(loaded.network, np.ones(4), mode)
        assert out.shape == (2,)

    def test_bad_magic(self, checkpoint):
        """Wrong magic bytes raise CheckpointError"""
        data = b"XXXX" + checkpoint_to_bytes(checkpoint)[4:]
        with pytest.raises(CheckpointError):
            checkpoint_from_bytes(data)

    def test_bad_version(self, checkpoint):
        """Unknown format versions raise CheckpointError"""
        data = bytearray(checkpoint_to_bytes(checkpoint))
        data[4:8] = (2).to_bytes(4, "little")
        with pytest.raises(CheckpointError):
            checkpoint_from_bytes(bytes(data))

    def test_truncated_payload(self, checkpoint):
        """Truncated files raise CheckpointError"""
        with pytest.raises(CheckpointError):
            checkpoint_from_bytes(checkpoint_to_bytes(checkpoint)[:-4])

    def test_missing_file(self, tmp_path):
        """Missing files raise CheckpointError"""
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "nope.orlb")

    def test_save_leaves_no_temp_files(self, checkpoint, tmp_path):
        """Atomic save leaves only the target file"""
        save_checkpoint(tmp_path / "a.orlb", checkpoint)
        assert [p.name for p in tmp_path.iterdir()] == ["a.orlb"]
