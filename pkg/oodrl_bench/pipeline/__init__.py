"""Experiment stages over one output directory"""

from .orchestrator import (
    FAILED_TRIALS_FILE,
    CheckpointProvider,
    ExperimentOrchestrator,
    StageRun,
    checkpoint_name,
    curve_name,
    slug,
    train_trial,
)
from .report import RESULTS_FILE, best_per_method, load_results, summarize

__all__ = [
    "CheckpointProvider",
    "ExperimentOrchestrator",
    "FAILED_TRIALS_FILE",
    "RESULTS_FILE",
    "StageRun",
    "best_per_method",
    "checkpoint_name",
    "curve_name",
    "load_results",
    "slug",
    "summarize",
    "train_trial",
]
