"""
Repeated trials and their aggregation

Each trial gets its own models (seed = base_seed + trial index), collects
ID / OOD scores and computes one AUC. With more than one job, trials run in
spawned worker processes; results are ordered by trial index whatever order
they finish in.
"""

import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Any, Callable, Optional, TypeVar

import numpy as np

from ..agents import Policy, policy_from_results, train_members
from ..config import ExperimentConfig
from ..envs import make_variant, resolve_variant
from ..errors import ConfigError, DataError, TrainingError
from ..uncertainty import UncertaintyMethod
from ..utils import logger_settings, setup_logger, trial_seed
from .collect import ScoreSample, collect_scores, episode_means, split_scores
from .roc import RocResult, auc, rank_auc

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "env",
    "variant",
    "method",
    "aggregation",
    "trial",
    "auc",
    "best_threshold",
    "youden_j",
    "n_id",
    "n_ood",
    "seed",
]

ModelProvider = Callable[[int, int], Policy]
T = TypeVar("T")


@dataclass
class TrialResult:
    """Outcome of one trial; failed trials carry the error instead of an AUC"""

    trial: int
    seed: int
    auc: Optional[float] = None
    best_threshold: Optional[float] = None
    youden_j: Optional[float] = None
    n_id: int = 0
    n_ood: int = 0
    episode_auc: Optional[float] = None
    status: str = "ok"
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @classmethod
    def from_roc(
        cls, trial: int, seed: int, roc: RocResult, episode_auc: Optional[float]
    ) -> "TrialResult":
        return cls(
            trial=trial,
            seed=seed,
            auc=roc.auc,
            best_threshold=roc.best_threshold,
            youden_j=roc.youden_j,
            n_id=roc.n_id,
            n_ood=roc.n_ood,
            episode_auc=episode_auc,
        )


@dataclass
class AggregateResult:
    """Mean ± std (divisor n - 1) of the successful trials' AUCs"""

    mean_auc: float
    std_auc: float
    trials: list[TrialResult] = field(default_factory=list)
    failed_trials: list[int] = field(default_factory=list)
    single_trial: bool = False

    @property
    def n_trials(self) -> int:
        return sum(1 for t in self.trials if t.ok)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean_auc": self.mean_auc,
            "std_auc": self.std_auc,
            "n_trials": self.n_trials,
            "single_trial": self.single_trial,
            "failed_trials": list(self.failed_trials),
            "trials": [asdict(t) for t in self.trials],
        }


def mean_std(values: list[float]) -> tuple[float, float]:
    """Mean and sample std (0.0 for a single value)

    Raises:
        DataError: If ``values`` is empty
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise DataError("No values to aggregate")
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return float(np.mean(arr)), std


def aggregate(trials: list[TrialResult]) -> AggregateResult:
    """Aggregate trial AUCs, excluding (and listing) failed trials

    Raises:
        DataError: If no trial succeeded
    """
    ordered = sorted(trials, key=lambda t: t.trial)
    ok = [t for t in ordered if t.ok]
    failed = [t.trial for t in ordered if not t.ok]
    if not ok:
        raise DataError(f"All {len(ordered)} trials failed")
    mean, std = mean_std([t.auc for t in ok])
    if failed:
        logger.warning(f"Trials {failed} failed and are excluded from the aggregate")
    return AggregateResult(
        mean_auc=mean,
        std_auc=std,
        trials=ordered,
        failed_trials=failed,
        single_trial=len(ok) == 1,
    )


def evaluate_trial(
    config: ExperimentConfig,
    policy: Policy,
    variant: str,
    trial: int,
    seed: int,
) -> tuple[TrialResult, list[ScoreSample]]:
    """Collect scores for one trial's models and compute its AUC"""
    method = UncertaintyMethod.from_config(config.uncertainty)
    samples = collect_scores(
        method,
        policy,
        make_variant(config.env),
        resolve_variant(variant, env_id=config.env).build(),
        config.evaluation.episodes_per_side,
        trial_seed=seed,
        trial=trial,
        greedy=config.uncertainty.greedy,
    )
    id_scores, ood_scores = split_scores(samples)
    roc = auc(id_scores, ood_scores, config.evaluation.threshold_rule)
    id_means, ood_means = episode_means(samples)
    result = TrialResult.from_roc(trial, seed, roc, rank_auc(id_means, ood_means))
    logger.info(f"Trial {trial} ({variant}): AUC {roc.auc:.3f}, threshold {roc.best_threshold:.4g}")
    return result, samples


class TrainProvider:
    """Model provider that trains the trial's networks in memory

    A plain class rather than a closure so worker processes can unpickle it.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config

    def __call__(self, trial: int, seed: int) -> Policy:
        return policy_from_results(train_members(self.config, seed))


def train_provider(config: ExperimentConfig) -> ModelProvider:
    return TrainProvider(config)


def _init_worker(settings: Optional[tuple[int, str]]) -> None:
    if settings is not None:
        setup_logger("oodrl_bench", *settings)


def map_trials(fn: Callable[[int], T], n_trials: int, workers: int) -> list[T]:
    """Apply ``fn`` to trial indices ``0..n_trials-1``, in trial order

    One worker runs in the calling process. More workers use a spawned
    process pool, so ``fn`` and everything it closes over must pickle
    (module-level functions, ``functools.partial`` of them, plain objects).
    """
    workers = max(1, min(workers, n_trials))
    if workers == 1:
        return [fn(trial) for trial in range(n_trials)]
    with ProcessPoolExecutor(
        max_workers=workers,
        mp_context=multiprocessing.get_context("spawn"),
        initializer=_init_worker,
        initargs=(logger_settings("oodrl_bench"),),
    ) as pool:
        return list(pool.map(fn, range(n_trials)))


def run_trial(
    config: ExperimentConfig, variant: str, provider: ModelProvider, trial: int
) -> TrialResult:
    """One trial; a TrainingError marks it failed instead of raising"""
    seed = trial_seed(config.base_seed, trial)
    try:
        policy = provider(trial, seed)
        return evaluate_trial(config, policy, variant, trial, seed)[0]
    except TrainingError as e:
        logger.warning(f"Trial {trial} failed: {e}")
        return TrialResult(trial=trial, seed=seed, status="failed", error=str(e))


def run_trials(
    config: ExperimentConfig,
    variant: Optional[str] = None,
    n_trials: Optional[int] = None,
    model_provider: Optional[ModelProvider] = None,
    jobs: Optional[int] = None,
) -> AggregateResult:
    """Run ``n_trials`` trials for one variant and aggregate their AUCs

    Args:
        config: Experiment configuration
        variant: OOD variant id; defaults to the first configured variant
        n_trials: Defaults to ``config.evaluation.trials``
        model_provider: ``(trial index, trial seed) -> Policy``; defaults to
            training the models in memory. Must pickle when ``jobs > 1``
        jobs: Worker processes; defaults to ``config.jobs``

    Raises:
        ConfigError: If no variant is given or configured
        DataError: If every trial failed
    """
    config = config.resolved()
    if variant is None:
        if not config.variants:
            raise ConfigError("run_trials needs a variant")
        variant = config.variant_specs()[0].variant_id
    n_trials = n_trials or config.evaluation.trials
    if n_trials < 1:
        raise ConfigError(f"n_trials must be >= 1, got {n_trials}")
    provider = model_provider or train_provider(config)

    workers = jobs or config.jobs
    logger.info(f"Running {n_trials} trials of {variant} on up to {workers} worker(s)")
    results = map_trials(partial(run_trial, config, variant, provider), n_trials, workers)
    return aggregate(results)
