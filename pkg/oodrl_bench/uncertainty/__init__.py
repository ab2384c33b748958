"""MC Dropout, MC DropConnect and ensemble uncertainty scores"""

from .scoring import (
    AGGREGATIONS,
    METHODS,
    StepScore,
    UncertaintyMethod,
    aggregate_std,
    check_compatible,
    ensemble_score,
    mc_score,
    score_observation,
    step_score,
)

__all__ = [
    "AGGREGATIONS",
    "METHODS",
    "StepScore",
    "UncertaintyMethod",
    "aggregate_std",
    "check_compatible",
    "ensemble_score",
    "mc_score",
    "score_observation",
    "step_score",
]
