"""Summaries of detect results across one or more output directories"""

import logging
from pathlib import Path
from typing import Sequence

import pandas as pd

from ..errors import DataError
from ..evalkit import RESULT_COLUMNS

logger = logging.getLogger(__name__)

RESULTS_FILE = "detect/results.csv"
SUMMARY_KEYS = ["run", "env", "variant", "method"]


def load_results(output_dirs: Sequence[str | Path]) -> pd.DataFrame:
    """Concatenate ``detect/results.csv`` of every directory, tagged with a ``run`` column

    Raises:
        DataError: If a directory has no results or they lack required columns
    """
    if not output_dirs:
        raise DataError("No output directories given")

    frames = []
    for output_dir in output_dirs:
        path = Path(output_dir) / RESULTS_FILE
        if not path.is_file():
            raise DataError(f"No detection results at {path}; run detect first")
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise DataError(f"Cannot read {path}: {e}") from e
        missing = [c for c in RESULT_COLUMNS if c not in frame.columns]
        if missing:
            raise DataError(f"{path} is missing columns {missing}")
        frames.append(frame.assign(run=str(output_dir)))
        logger.info(f"Loaded {len(frame)} result rows from {path}")
    return pd.concat(frames, ignore_index=True)


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """Mean and sample std of the AUC per (run, env, variant, method)

    Rows keep the order in which their groups first appear. A single trial
    has std 0.
    """
    ordered = results.sort_values("trial", kind="stable")
    grouped = ordered.groupby(SUMMARY_KEYS, sort=False)["auc"]
    summary = grouped.agg(
        trial_aucs=list, mean_auc="mean", std_auc=lambda s: s.std(ddof=1), n_trials="count"
    ).reset_index()
    summary["std_auc"] = summary["std_auc"].fillna(0.0)
    order = results.drop_duplicates(SUMMARY_KEYS)[SUMMARY_KEYS]
    return order.merge(summary, on=SUMMARY_KEYS, how="left").reset_index(drop=True)


def best_per_method(summary: pd.DataFrame) -> pd.DataFrame:
    """The variant with the highest mean AUC for every (env, method)

    Ties go to the group listed first.
    """
    best = summary.groupby(["env", "method"], sort=False)["mean_auc"].idxmax()
    return summary.loc[best.to_list()].reset_index(drop=True)
