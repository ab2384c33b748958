"""
Uncertainty scores from stochastic forward passes or ensemble disagreement

MC Dropout / MC DropConnect run K forward passes of one network with fresh
masks; ensembles run every member deterministically. Both reduce the stacked
outputs to a per-output mean and sample standard deviation (divisor n - 1),
and ``step_score`` turns the std vector into one scalar per timestep.
"""

import logging
from dataclasses import dataclass
from typing import Any, Literal, Optional, Sequence

import numpy as np

from ..config import UncertaintyConfig
from ..errors import MethodError, ShapeError, SpecError
from ..nncore import Checkpoint, Network, StochasticMode, forward

logger = logging.getLogger(__name__)

METHODS = ("mc_dropout", "mc_dropconnect", "ensemble")
AGGREGATIONS = ("chosen_action_std", "max_action_std", "mean_action_std")
REQUIRED_LAYERS = {"mc_dropout": "dropout", "mc_dropconnect": "dropconnect"}

ModelLike = Network | Checkpoint


@dataclass(frozen=True)
class UncertaintyMethod:
    """How a step is scored

    Attributes:
        kind: mc_dropout, mc_dropconnect or ensemble
        samples: K forward passes for the MC methods
        members: M networks expected for ensembles
        aggregation: Reduction of per-action stds for discrete control
    """

    kind: Literal["mc_dropout", "mc_dropconnect", "ensemble"]
    samples: int = 5
    members: int = 5
    aggregation: str = "chosen_action_std"

    def __post_init__(self) -> None:
        if self.kind not in METHODS:
            raise MethodError(f"Unknown uncertainty method '{self.kind}'. Available: {METHODS}")
        if self.samples < 2:
            raise MethodError(f"MC methods need K >= 2 samples, got {self.samples}")
        if self.members < 2:
            raise MethodError(f"Ensembles need M >= 2 members, got {self.members}")
        if self.aggregation not in AGGREGATIONS:
            raise MethodError(
                f"Unknown aggregation '{self.aggregation}'. Available: {AGGREGATIONS}"
            )

    @classmethod
    def from_config(cls, config: UncertaintyConfig) -> "UncertaintyMethod":
        return cls(
            kind=config.method,
            samples=config.samples,
            members=config.members,
            aggregation=config.aggregation,
        )

    @property
    def is_mc(self) -> bool:
        return self.kind != "ensemble"


@dataclass(frozen=True)
class StepScore:
    """Scores of one observation

    ``mean`` and ``std`` have one entry per network output (Q value or
    action dimension); ``action`` is what the mean output selects.
    """

    mean: np.ndarray
    std: np.ndarray
    score: float
    action: Any


def _network(model: ModelLike) -> Network:
    return model.network if isinstance(model, Checkpoint) else model


def _mean_std(outputs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and sample std over axis 0; std is exactly 0 where all rows agree"""
    mean = outputs.mean(axis=0)
    std = outputs.std(axis=0, ddof=1)
    std[np.all(outputs == outputs[0], axis=0)] = 0.0
    return mean, std


def mc_score(
    model: ModelLike,
    x: np.ndarray,
    samples: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and std of K forward passes with freshly sampled masks

    Args:
        model: Network (or checkpoint) with dropout or dropconnect layers
        x: Encoded observation
        samples: K >= 2
        rng: Mask stream

    Raises:
        MethodError: If the network has no stochastic layers, K < 2 or rng is missing

    Example:
        >>> mean, std = mc_score(net, x, samples=5, rng=np.random.default_rng(0))
    """
    net = _network(model)
    if net.spec.stochastic == "none":
        raise MethodError("MC scoring needs a network with dropout or dropconnect layers")
    if samples < 2:
        raise MethodError(f"MC scoring needs K >= 2 samples, got {samples}")
    if rng is None:
        raise MethodError("MC scoring needs an rng stream")

    mode = StochasticMode.sampled(rng)
    outputs = np.stack([forward(net, x, mode)[0] for _ in range(samples)])
    return _mean_std(outputs)


def ensemble_score(members: Sequence[ModelLike], x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and std across members, each evaluated deterministically

    Outputs are sorted along the member axis before reduction so the result
    does not depend on member order.

    Raises:
        MethodError: With fewer than 2 members
        SpecError: If member output widths differ
    """
    nets = [_network(m) for m in members]
    if len(nets) < 2:
        raise MethodError(f"Ensemble scoring needs >= 2 members, got {len(nets)}")
    widths = {(n.spec.input_dim, n.spec.output_dim) for n in nets}
    if len(widths) > 1:
        raise SpecError(f"Ensemble members disagree on input/output widths: {sorted(widths)}")

    outputs = np.sort(np.stack([forward(n, x)[0] for n in nets]), axis=0)
    return _mean_std(outputs)


def aggregate_std(mean: np.ndarray, std: np.ndarray, aggregation: str, discrete: bool) -> float:
    """Scalar score from per-output stds

    Discrete control reduces per-action stds: ``chosen_action_std`` takes the
    std of the action with the highest mean Q, ``max_action_std`` and
    ``mean_action_std`` the max / mean over actions. Continuous control uses
    the actor-output std (averaged over action dimensions).
    """
    if std.shape != mean.shape or std.ndim != 1:
        raise ShapeError(f"Expected matching 1-D mean/std, got {mean.shape} and {std.shape}")
    if not discrete:
        return float(np.mean(std))
    if aggregation == "chosen_action_std":
        return float(std[int(np.argmax(mean))])
    if aggregation == "max_action_std":
        return float(np.max(std))
    if aggregation == "mean_action_std":
        return float(np.mean(std))
    raise MethodError(f"Unknown aggregation '{aggregation}'")


def check_compatible(method: UncertaintyMethod, models: Sequence[ModelLike]) -> None:
    """Reject models the method cannot score

    Raises:
        MethodError: MC methods need exactly one network with the matching
            stochastic layer; ensembles need at least two members
    """
    nets = [_network(m) for m in models]
    if not nets:
        raise MethodError("No models to score")
    if method.kind == "ensemble":
        if len(nets) < 2:
            raise MethodError(f"Ensemble scoring needs >= 2 members, got {len(nets)}")
        if len(nets) != method.members:
            logger.warning(f"Ensemble has {len(nets)} members, method expects {method.members}")
        return

    if len(nets) != 1:
        raise MethodError(f"{method.kind} scores a single network, got {len(nets)}")
    required = REQUIRED_LAYERS[method.kind]
    if nets[0].spec.stochastic != required:
        raise MethodError(
            f"{method.kind} needs a {required} network, got stochastic='{nets[0].spec.stochastic}'"
        )


def score_observation(
    method: UncertaintyMethod,
    models: Sequence[ModelLike],
    x: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    discrete: bool = True,
) -> StepScore:
    """Full score of one encoded observation

    Args:
        method: Scoring method
        models: One network for MC methods, the members for ensembles
        x: Encoded observation
        rng: Mask stream (MC methods only)
        discrete: True for Q networks, False for actors
    """
    if method.is_mc:
        mean, std = mc_score(models[0], x, method.samples, rng)
    else:
        mean, std = ensemble_score(models, x)

    score = aggregate_std(mean, std, method.aggregation, discrete)
    if discrete:
        action: Any = int(np.argmax(mean))
    else:
        bound = _network(models[0]).spec.output_bound
        action = np.clip(mean, -bound, bound) if bound is not None else mean
    return StepScore(mean=mean, std=std, score=score, action=action)


def step_score(
    method: UncertaintyMethod,
    models: Sequence[ModelLike],
    x: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    discrete: bool = True,
) -> float:
    """Scalar uncertainty score of one encoded observation"""
    return score_observation(method, models, x, rng, discrete).score
