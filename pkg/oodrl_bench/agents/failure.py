"""Finding the variants where a trained policy fails"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..envs import VariantSpec, resolve_variant
from ..errors import ConfigError
from .policy import Policy
from .rollout import rollout

logger = logging.getLogger(__name__)

RETURN_COLUMNS = ["variant", "is_baseline", "mean_return", "std_return", "episodes", "failing"]


@dataclass(frozen=True)
class FailureRule:
    """A variant fails when its mean greedy return is below ``threshold(baseline)``

    Either ``factor`` (threshold = factor * baseline mean return) or
    ``absolute`` (a fixed threshold) is set.
    """

    factor: Optional[float] = None
    absolute: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.factor is None) == (self.absolute is None):
            raise ConfigError("FailureRule needs exactly one of factor / absolute")

    @classmethod
    def for_env(cls, env_id: str) -> "FailureRule":
        """cartpole: below half the baseline; pendulum: below twice the (negative) baseline;
        minipong: losing on average"""
        if env_id == "cartpole":
            return cls(factor=0.5)
        if env_id == "pendulum":
            return cls(factor=2.0)
        if env_id == "minipong":
            return cls(absolute=0.0)
        raise ConfigError(f"No default failure rule for '{env_id}'")

    def threshold(self, baseline: float) -> float:
        return self.absolute if self.absolute is not None else self.factor * baseline

    def is_failing(self, mean_return: float, baseline: float) -> bool:
        return mean_return < self.threshold(baseline)


@dataclass(frozen=True)
class VariantReturn:
    """Greedy return statistics of one variant"""

    variant: str
    is_baseline: bool
    mean_return: float
    std_return: float
    episodes: int
    failing: bool = False

    def to_row(self) -> dict:
        return {
            "variant": self.variant,
            "is_baseline": self.is_baseline,
            "mean_return": self.mean_return,
            "std_return": self.std_return,
            "episodes": self.episodes,
            "failing": self.failing,
        }


def _mean_return(
    policy: Policy, spec: VariantSpec, episodes: int, seed: int
) -> tuple[float, float]:
    # the same reset seeds for every variant
    runs = rollout(policy, spec.build(), episodes, np.random.default_rng(seed))
    returns = np.array([e.total_return for e in runs])
    return float(returns.mean()), float(returns.std())


def evaluate_variants(
    policy: Policy,
    env_id: str,
    variants: Sequence[str | VariantSpec],
    episodes: int,
    seed: int,
    rule: Optional[FailureRule] = None,
) -> list[VariantReturn]:
    """Mean greedy return on the default env (first row) and every variant

    Args:
        policy: Trained policy
        env_id: Training environment
        variants: Variant ids or resolved specs of ``env_id``
        episodes: Greedy episodes per variant
        seed: Reset seed shared by all variants
        rule: Failure rule; defaults to ``FailureRule.for_env(env_id)``
    """
    rule = rule or FailureRule.for_env(env_id)
    specs = [
        v if isinstance(v, VariantSpec) else resolve_variant(v, env_id=env_id) for v in variants
    ]

    baseline_mean, baseline_std = _mean_return(policy, resolve_variant(env_id), episodes, seed)
    rows = [VariantReturn(env_id, True, baseline_mean, baseline_std, episodes)]
    logger.info(f"Baseline {env_id}: mean return {baseline_mean:.2f}")

    for spec in specs:
        mean, std = _mean_return(policy, spec, episodes, seed)
        failing = rule.is_failing(mean, baseline_mean)
        rows.append(VariantReturn(spec.variant_id, False, mean, std, episodes, failing))
        flag = " (failing)" if failing else ""
        logger.info(f"Variant {spec.variant_id}: mean return {mean:.2f}{flag}")
    return rows


def find_failing_variants(
    policy: Policy,
    env_id: str,
    variants: Sequence[str | VariantSpec],
    episodes: int,
    seed: int,
    rule: Optional[FailureRule] = None,
) -> list[str]:
    """Ids of the variants where the policy fails

    Raises:
        ConfigError: If ``variants`` is empty
    """
    if not variants:
        raise ConfigError("find_failing_variants needs at least one variant")
    rows = evaluate_variants(policy, env_id, variants, episodes, seed, rule)
    return [row.variant for row in rows if row.failing]
