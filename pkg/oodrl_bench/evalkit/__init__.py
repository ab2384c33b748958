"""ID/OOD score collection, ROC/AUC and multi-trial aggregation"""

from .collect import (
    SAMPLE_COLUMNS,
    ScoredEpisode,
    ScoreSample,
    collect_scores,
    episode_means,
    episode_streams,
    run_scored_episode,
    split_scores,
    trace_report,
)
from .roc import RocPoint, RocResult, auc, rank_auc
from .trials import (
    RESULT_COLUMNS,
    AggregateResult,
    ModelProvider,
    TrainProvider,
    TrialResult,
    aggregate,
    evaluate_trial,
    map_trials,
    mean_std,
    run_trial,
    run_trials,
    train_provider,
)

__all__ = [
    "AggregateResult",
    "ModelProvider",
    "RESULT_COLUMNS",
    "RocPoint",
    "RocResult",
    "SAMPLE_COLUMNS",
    "ScoreSample",
    "ScoredEpisode",
    "TrainProvider",
    "TrialResult",
    "aggregate",
    "auc",
    "collect_scores",
    "episode_means",
    "episode_streams",
    "evaluate_trial",
    "map_trials",
    "mean_std",
    "rank_auc",
    "run_scored_episode",
    "run_trial",
    "run_trials",
    "split_scores",
    "trace_report",
    "train_provider",
]
