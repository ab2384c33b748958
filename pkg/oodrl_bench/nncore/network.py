"""Feed-forward network with exact reverse-mode gradients

A network is a chain of dense layers ``z = a_prev @ W.T + b`` followed by an
activation. Hidden layers may carry a stochastic regularizer:

- dropout: a Bernoulli(1 - rate) mask on every hidden activation
- dropconnect: a Bernoulli(1 - rate) mask on every weight entry of the
  layers that produce hidden activations (biases are never masked)

Kept units / weights are scaled by 1 / (1 - rate), so the deterministic mode
needs no rescaling. The output layer is never masked.

Example:
    >>> spec = NetworkSpec(layer_dims=(4, 64, 64, 2), stochastic="dropout", rate=0.1)
    >>> net = init_network(spec, seed=7)
    >>> out, tape = forward(net, np.zeros(4), StochasticMode.sampled(np.random.default_rng(0)))
    >>> grads = backward(net, tape, np.ones(2))
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Sequence

import numpy as np

from ..errors import ShapeError, SpecError, UsageError

Activation = Literal["relu", "tanh", "identity"]
OutputActivation = Literal["identity", "tanh_scaled"]
Stochastic = Literal["none", "dropout", "dropconnect"]

_ACTIVATIONS = ("relu", "tanh", "identity")
_OUTPUT_ACTIVATIONS = ("identity", "tanh_scaled")
_STOCHASTIC = ("none", "dropout", "dropconnect")

_uid_counter = itertools.count(1)


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture description

    Attributes:
        layer_dims: Layer widths from input to output (at least 2 entries)
        activations: One activation per hidden layer; a single entry is broadcast
        output_activation: "identity" or "tanh_scaled" (bound * tanh)
        output_bound: Bound for tanh_scaled outputs
        stochastic: "none", "dropout" or "dropconnect"
        rate: Drop probability in [0, 1)
    """

    layer_dims: tuple[int, ...]
    activations: tuple[str, ...] = ("relu",)
    output_activation: str = "identity"
    output_bound: Optional[float] = None
    stochastic: str = "none"
    rate: float = 0.0

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.layer_dims)
        object.__setattr__(self, "layer_dims", dims)

        if len(dims) < 2:
            raise SpecError(f"layer_dims needs at least 2 entries, got {dims}")
        if any(d < 1 for d in dims):
            raise SpecError(f"layer_dims must be positive, got {dims}")

        n_hidden = len(dims) - 2
        acts = tuple(self.activations)
        if len(acts) == 1 and n_hidden != 1:
            acts = acts * n_hidden
        if len(acts) != n_hidden:
            raise SpecError(f"Expected {n_hidden} hidden activations, got {len(acts)}")
        for act in acts:
            if act not in _ACTIVATIONS:
                raise SpecError(f"Unknown activation: {act}")
        object.__setattr__(self, "activations", acts)

        if self.output_activation not in _OUTPUT_ACTIVATIONS:
            raise SpecError(f"Unknown output activation: {self.output_activation}")
        if self.output_activation == "tanh_scaled":
            if self.output_bound is None or not self.output_bound > 0:
                raise SpecError("tanh_scaled output needs a bound > 0")
            object.__setattr__(self, "output_bound", float(self.output_bound))

        if self.stochastic not in _STOCHASTIC:
            raise SpecError(f"Unknown stochastic mode: {self.stochastic}")
        rate = float(self.rate)
        if not 0.0 <= rate < 1.0:
            raise SpecError(f"rate must be in [0, 1), got {rate}")
        object.__setattr__(self, "rate", rate)

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    def with_stochastic(self, stochastic: str, rate: float) -> "NetworkSpec":
        """Copy of this spec with another stochastic layer setting"""
        return NetworkSpec(
            layer_dims=self.layer_dims,
            activations=self.activations,
            output_activation=self.output_activation,
            output_bound=self.output_bound,
            stochastic=stochastic,
            rate=rate,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "layer_dims": list(self.layer_dims),
            "activations": list(self.activations),
            "output_activation": self.output_activation,
            "output_bound": self.output_bound,
            "stochastic": self.stochastic,
            "rate": self.rate,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NetworkSpec":
        return cls(
            layer_dims=tuple(data["layer_dims"]),
            activations=tuple(data.get("activations", ())),
            output_activation=data.get("output_activation", "identity"),
            output_bound=data.get("output_bound"),
            stochastic=data.get("stochastic", "none"),
            rate=data.get("rate", 0.0),
        )


@dataclass
class Network:
    """Weights and biases of a network

    ``weights[i]`` has shape (layer_dims[i + 1], layer_dims[i]). Every
    in-place parameter change must go through ``mark_updated`` so tapes
    recorded before the change are rejected by ``backward``.
    """

    spec: NetworkSpec
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    uid: int = field(default_factory=lambda: next(_uid_counter))
    version: int = 0

    def __post_init__(self) -> None:
        self.weights = [np.array(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.array(b, dtype=np.float64) for b in self.biases]
        if len(self.weights) != self.spec.n_layers or len(self.biases) != self.spec.n_layers:
            raise ShapeError(
                f"Expected {self.spec.n_layers} layers, got "
                f"{len(self.weights)} weights / {len(self.biases)} biases"
            )
        dims = self.spec.layer_dims
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i + 1], dims[i]):
                raise ShapeError(f"Layer {i} weight shape {w.shape} != {(dims[i + 1], dims[i])}")
            if b.shape != (dims[i + 1],):
                raise ShapeError(f"Layer {i} bias shape {b.shape} != {(dims[i + 1],)}")

    def mark_updated(self) -> None:
        self.version += 1

    def parameters(self) -> list[np.ndarray]:
        """Weights and biases interleaved in layer order"""
        params: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())

    def clone(self) -> "Network":
        """Value-independent deep copy with a fresh identity"""
        return clone_perturb_free(self)


@dataclass(frozen=True)
class StochasticMode:
    """Whether a forward pass samples masks

    ``rng`` only needs a ``random(shape)`` method returning uniforms in [0, 1).
    """

    rng: Any = None

    @property
    def is_sampled(self) -> bool:
        return self.rng is not None

    @classmethod
    def deterministic(cls) -> "StochasticMode":
        return cls(rng=None)

    @classmethod
    def sampled(cls, rng: Any) -> "StochasticMode":
        if rng is None:
            raise UsageError("sampled mode needs an rng stream")
        return cls(rng=rng)


@dataclass
class Tape:
    """Values recorded by ``forward`` for ``backward``"""

    net_uid: int
    net_version: int
    batched: bool
    inputs: list[np.ndarray]  # layer inputs, after dropout masks
    pre_activations: list[np.ndarray]
    outputs: np.ndarray
    dropout_masks: list[Optional[np.ndarray]]
    weight_masks: list[Optional[np.ndarray]]
    effective_weights: list[np.ndarray]


@dataclass
class Gradients:
    """Gradients of a scalar objective w.r.t. parameters and input"""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    input: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        arrays: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            arrays.extend((w, b))
        return arrays

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g * g)) for g in self.arrays())))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.arrays())

    def clip_by_global_norm(self, max_norm: float) -> "Gradients":
        """Scale all gradients so their global norm is at most ``max_norm``"""
        norm = self.global_norm()
        if not np.isfinite(norm) or norm <= max_norm:
            return self
        scale = max_norm / norm
        return Gradients(
            weights=[w * scale for w in self.weights],
            biases=[b * scale for b in self.biases],
            input=self.input,
        )


def init_network(spec: NetworkSpec, seed: int) -> Network:
    """Glorot-uniform weights, zero biases

    Same (spec, seed) always yields bit-identical parameters.
    """
    if not isinstance(spec, NetworkSpec):
        raise SpecError(f"Expected NetworkSpec, got {type(spec).__name__}")

    rng = np.random.default_rng(int(seed))
    weights = []
    biases = []
    for fan_in, fan_out in zip(spec.layer_dims[:-1], spec.layer_dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(spec=spec, weights=weights, biases=biases)


def _activate(kind: str, z: np.ndarray, bound: Optional[float] = None) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    if kind == "tanh_scaled":
        return bound * np.tanh(z)
    return z


def _activation_grad(kind: str, z: np.ndarray, bound: Optional[float] = None) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    if kind == "tanh_scaled":
        t = np.tanh(z)
        return bound * (1.0 - t * t)
    return np.ones_like(z)


def _keep_mask(rng: Any, shape: tuple[int, ...], rate: float) -> np.ndarray:
    keep = 1.0 - rate
    return (np.asarray(rng.random(shape)) < keep).astype(np.float64) / keep


def forward(
    net: Network,
    x: np.ndarray | Sequence[float],
    mode: StochasticMode = StochasticMode(),
) -> tuple[np.ndarray, Tape]:
    """Forward pass

    Args:
        net: Network to evaluate
        x: Input vector (input_dim,) or row batch (n, input_dim)
        mode: Deterministic (no masks) or sampled (fresh masks from mode.rng).
            Dropout masks are drawn per row; one dropconnect mask is drawn per
            call and shared by all rows.

    Returns:
        (output, tape); output has shape (output_dim,) or (n, output_dim)

    Raises:
        ShapeError: If the input width does not match layer_dims[0]
    """
    spec = net.spec
    arr = np.asarray(x, dtype=np.float64)
    batched = arr.ndim == 2
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != spec.input_dim:
        raise ShapeError(f"Input shape {np.shape(x)} does not match input_dim {spec.input_dim}")

    sampled = mode.is_sampled and spec.stochastic != "none"
    last = spec.n_layers - 1

    inputs: list[np.ndarray] = []
    pre_activations: list[np.ndarray] = []
    dropout_masks: list[Optional[np.ndarray]] = []
    weight_masks: list[Optional[np.ndarray]] = []
    effective_weights: list[np.ndarray] = []

    a = arr
    mask_in: Optional[np.ndarray] = None
    for i in range(spec.n_layers):
        inputs.append(a)
        dropout_masks.append(mask_in)

        w = net.weights[i]
        w_mask = None
        if sampled and spec.stochastic == "dropconnect" and i < last:
            w_mask = _keep_mask(mode.rng, w.shape, spec.rate)
            w = w * w_mask
        weight_masks.append(w_mask)
        effective_weights.append(w)

        z = a @ w.T + net.biases[i]
        pre_activations.append(z)

        if i == last:
            a = _activate(spec.output_activation, z, spec.output_bound)
            break

        h = _activate(spec.activations[i], z)
        mask_in = None
        if sampled and spec.stochastic == "dropout":
            mask_in = _keep_mask(mode.rng, h.shape, spec.rate)
            h = h * mask_in
        a = h

    tape = Tape(
        net_uid=net.uid,
        net_version=net.version,
        batched=batched,
        inputs=inputs,
        pre_activations=pre_activations,
        outputs=a,
        dropout_masks=dropout_masks,
        weight_masks=weight_masks,
        effective_weights=effective_weights,
    )
    return (a if batched else a[0]), tape


def backward(net: Network, tape: Tape, output_grad: np.ndarray | Sequence[float]) -> Gradients:
    """Exact gradients of ``sum(output * output_grad)``

    Masks recorded on the tape are reused, so the gradients are those of the
    sampled sub-network.

    Raises:
        UsageError: If the tape was recorded on another network or before a
            parameter update
        ShapeError: If output_grad does not match the recorded output
    """
    if tape.net_uid != net.uid or tape.net_version != net.version:
        raise UsageError("Stale tape: network changed since the forward pass")

    spec = net.spec
    g = np.asarray(output_grad, dtype=np.float64)
    if not tape.batched:
        g = g[None, :] if g.ndim == 1 else g
    if g.shape != tape.outputs.shape:
        raise ShapeError(
            f"output_grad shape {np.shape(output_grad)} != output {tape.outputs.shape}"
        )

    n_layers = spec.n_layers
    grad_w: list[np.ndarray] = [np.empty(0)] * n_layers
    grad_b: list[np.ndarray] = [np.empty(0)] * n_layers

    upstream = g
    for i in reversed(range(n_layers)):
        z = tape.pre_activations[i]
        if i == n_layers - 1:
            dz = upstream * _activation_grad(spec.output_activation, z, spec.output_bound)
        else:
            dz = upstream * _activation_grad(spec.activations[i], z)

        dw_eff = dz.T @ tape.inputs[i]
        w_mask = tape.weight_masks[i]
        grad_w[i] = dw_eff * w_mask if w_mask is not None else dw_eff
        grad_b[i] = dz.sum(axis=0)

        upstream = dz @ tape.effective_weights[i]
        mask_in = tape.dropout_masks[i]
        if mask_in is not None:
            upstream = upstream * mask_in

    input_grad = upstream if tape.batched else upstream[0]
    return Gradients(weights=grad_w, biases=grad_b, input=input_grad)


def clone_perturb_free(net: Network) -> Network:
    """Deep copy for target networks and ensemble members

    The copy shares no arrays with the original and gets its own identity,
    so tapes of one are never accepted by the other.
    """
    return Network(
        spec=net.spec,
        weights=[w.copy() for w in net.weights],
        biases=[b.copy() for b in net.biases],
    )


def hard_update(target: Network, online: Network) -> None:
    """Copy online parameters into target in place"""
    _check_same_shape(target, online)
    for t, o in zip(target.parameters(), online.parameters()):
        t[...] = o
    target.mark_updated()


def soft_update(target: Network, online: Network, tau: float) -> None:
    """Polyak update in place: target <- tau * online + (1 - tau) * target

    tau=1 copies online exactly; tau=0 leaves target unchanged.
    """
    if not 0.0 <= tau <= 1.0:
        raise SpecError(f"tau must be in [0, 1], got {tau}")
    _check_same_shape(target, online)
    for t, o in zip(target.parameters(), online.parameters()):
        t[...] = tau * o + (1.0 - tau) * t
    target.mark_updated()


def _check_same_shape(a: Network, b: Network) -> None:
    if a.spec.layer_dims != b.spec.layer_dims:
        raise SpecError(f"Layer dims differ: {a.spec.layer_dims} vs {b.spec.layer_dims}")
