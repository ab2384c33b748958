"""OODRL Experiment Orchestrator - train, find failures, detect, preview

Every stage reads and writes files under one output directory:

    effective_config.json
    checkpoints/trial_XX/member_YY[_actor|_critic].orlb
    checkpoints/failed_trials.json
    curves/trial_XX_member_YY.csv
    evaluate/variant_returns.csv
    evaluate/failing_variants.json
    detect/results.csv
    detect/aggregate.json
    detect/traces/<variant>_trial_XX.csv
    previews/<kind>_<severity>.pgm
"""

import json
import logging
import re
import traceback
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import partial
from pathlib import Path
from typing import Any, Callable, Optional

from ..agents import (
    CURVE_COLUMNS,
    RETURN_COLUMNS,
    FailureRule,
    Policy,
    TrainResult,
    evaluate_variants,
    train_members,
)
from ..config import ExperimentConfig
from ..corruptions import KINDS, corrupt, severity_grid, severity_spec, spec_from_value
from ..envs import MiniPongEnv, VariantSpec, make_variant
from ..errors import ConfigError, DataError, TrainingError
from ..evalkit import RESULT_COLUMNS, AggregateResult, map_trials, run_trials, trace_report
from ..nncore import load_checkpoint, save_checkpoint
from ..sinks import LocalSink, pgm_to_frame
from ..uncertainty import UncertaintyMethod
from ..utils import make_rng, trial_seed

logger = logging.getLogger(__name__)

FAILED_TRIALS_FILE = "checkpoints/failed_trials.json"


@dataclass
class StageRun:
    """Record of one stage execution

    Attributes:
        name: Stage name (train, evaluate, detect, preview)
        status: running, completed or failed
        summary: Stage-specific counts on success
        error_type / error_message / traceback: Filled when the stage fails
    """

    name: str
    started_at: datetime
    status: str = "running"
    completed_at: Optional[datetime] = None
    summary: dict[str, Any] = field(default_factory=dict)
    error_type: Optional[str] = None
    error_message: Optional[str] = None
    traceback: Optional[str] = None


def checkpoint_name(trial: int, member: int, role: str) -> str:
    """Relative checkpoint path; Q networks carry no role suffix"""
    suffix = "" if role == "q" else f"_{role}"
    return f"checkpoints/trial_{trial:02d}/member_{member:02d}{suffix}.orlb"


def curve_name(trial: int, member: int) -> str:
    return f"curves/trial_{trial:02d}_member_{member:02d}.csv"


def slug(variant_id: str) -> str:
    """File-name-safe variant id"""
    return re.sub(r"[^A-Za-z0-9.]+", "_", variant_id).strip("_")


def read_failed_trials(output_dir: Path) -> dict[int, str]:
    path = output_dir / FAILED_TRIALS_FILE
    if not path.is_file():
        return {}
    return {int(k): v for k, v in json.loads(path.read_text(encoding="utf-8")).items()}


@dataclass(frozen=True)
class CheckpointProvider:
    """Loads a trial's policy from the checkpoints under one output directory

    Holds only paths and counts so it pickles into worker processes.
    """

    output_dir: Path
    role: str
    n_members: int

    def __call__(self, trial: int, seed: int) -> Policy:
        """Policy for ``trial``; the seed plays no part in loading

        Raises:
            TrainingError: If the trial diverged during training
            CheckpointError: If a checkpoint is missing or unreadable
        """
        failed = read_failed_trials(self.output_dir)
        if trial in failed:
            raise TrainingError(f"Trial {trial} failed during training: {failed[trial]}")
        checkpoints = [
            load_checkpoint(self.output_dir / checkpoint_name(trial, m, self.role))
            for m in range(self.n_members)
        ]
        return Policy.from_checkpoints(checkpoints)


TrainOutcome = tuple[int, Optional[list[TrainResult]], Optional[str]]


def train_trial(config: ExperimentConfig, trial: int) -> TrainOutcome:
    """Train one trial's members; divergence is returned, not raised"""
    seed = trial_seed(config.base_seed, trial)
    logger.info(f"Training trial {trial + 1}/{config.evaluation.trials} (seed {seed})")
    try:
        return trial, train_members(config, seed), None
    except TrainingError as e:
        logger.warning(f"Trial {trial} diverged: {e}")
        return trial, None, str(e)


class ExperimentOrchestrator:
    """Runs the experiment stages against one output directory

    Attributes:
        config: Resolved experiment configuration
        sink: Where outputs go
        runs: Stage records, in execution order

    Example:
        >>> orchestrator = ExperimentOrchestrator(load_config("config/experiment.yaml"))
        >>> orchestrator.run_stage("train")
        >>> orchestrator.run_stage("detect")
    """

    def __init__(self, config: ExperimentConfig, output_dir: Optional[str | Path] = None):
        """Initialize orchestrator

        Args:
            config: Experiment configuration (resolved here)
            output_dir: Overrides ``config.output_dir``
        """
        self.config = config.resolved()
        self.sink = LocalSink(output_dir or self.config.output_dir)
        self.runs: list[StageRun] = []
        self._stages: dict[str, Callable[..., dict[str, Any]]] = {
            "train": self.train,
            "evaluate": self.evaluate,
            "detect": self.detect,
            "preview": self.preview_corruption,
        }
        logger.info(
            f"Orchestrator initialized: env={self.config.env}, "
            f"method={self.config.uncertainty.method}, out={self.sink.output_dir}"
        )

    def run_stage(self, name: str, **kwargs: Any) -> StageRun:
        """Execute one stage and record it

        Raises:
            ConfigError: If the stage name is unknown
            Exception: Whatever the stage raised, after it is recorded
        """
        if name not in self._stages:
            raise ConfigError(f"Stage '{name}' not found. Available: {', '.join(self._stages)}")

        run = StageRun(name=name, started_at=datetime.now(timezone.utc))
        self.runs.append(run)
        try:
            logger.info(f"Starting stage: {name}")
            run.summary = self._stages[name](**kwargs)
            run.status = "completed"
            logger.info(f"Stage {name} completed: {run.summary}")
        except Exception as e:
            logger.error(f"Stage {name} failed: {e}", exc_info=True)
            run.status = "failed"
            run.error_type = type(e).__name__
            run.error_message = str(e)
            run.traceback = traceback.format_exc()
            raise
        finally:
            run.completed_at = datetime.now(timezone.utc)
        return run

    def write_effective_config(self) -> None:
        self.sink.write_json("effective_config.json", self.config.model_dump(mode="json"))

    @property
    def policy_role(self) -> str:
        return "q" if self.config.agent.algorithm == "dqn" else "actor"

    def failed_trials(self) -> dict[int, str]:
        return read_failed_trials(self.sink.output_dir)

    @property
    def checkpoints(self) -> CheckpointProvider:
        return CheckpointProvider(self.sink.output_dir, self.policy_role, self.config.n_members)

    def load_policy(self, trial: int) -> Policy:
        """Policy from a trial's checkpoints on disk

        Raises:
            TrainingError: If the trial diverged during training
            CheckpointError: If a checkpoint is missing or unreadable
        """
        return self.checkpoints(trial, trial_seed(self.config.base_seed, trial))

    def _first_trained_trial(self) -> int:
        failed = self.failed_trials()
        for trial in range(self.config.evaluation.trials):
            if trial not in failed:
                return trial
        raise TrainingError("Every trial failed during training")

    def train(self) -> dict[str, Any]:
        """Train every trial's networks and write checkpoints and curves

        Diverged trials are listed in ``checkpoints/failed_trials.json``;
        the stage then raises TrainingError after saving the others.
        """
        cfg = self.config
        self.write_effective_config()
        n_trials = cfg.evaluation.trials
        outcomes = map_trials(partial(train_trial, cfg), n_trials, cfg.jobs)

        failed: dict[str, str] = {}
        n_checkpoints = 0
        for trial, results, error in outcomes:
            if results is None:
                failed[str(trial)] = error or "diverged"
                continue
            for member, result in enumerate(results):
                for role, checkpoint in result.checkpoints.items():
                    path = self.sink.path(checkpoint_name(trial, member, role))
                    save_checkpoint(path, checkpoint)
                    n_checkpoints += 1
                self.sink.write_csv(curve_name(trial, member), result.curve, CURVE_COLUMNS)
        self.sink.write_json(FAILED_TRIALS_FILE, failed)

        if failed:
            raise TrainingError(f"Training diverged in trials {sorted(failed, key=int)}")
        return {"trials": n_trials, "members": cfg.n_members, "checkpoints": n_checkpoints}

    def evaluate(self) -> dict[str, Any]:
        """Mean greedy return of every configured variant; flag the failing ones"""
        cfg = self.config
        self.write_effective_config()
        trial = self._first_trained_trial()
        seed = trial_seed(cfg.base_seed, trial)
        rule = FailureRule.for_env(cfg.env)

        rows = evaluate_variants(
            self.load_policy(trial),
            cfg.env,
            cfg.variant_specs(),
            cfg.evaluation.failure_episodes,
            seed,
            rule,
        )
        failing = [r.variant for r in rows if r.failing]
        baseline = rows[0].mean_return

        self.sink.write_csv(
            "evaluate/variant_returns.csv", [r.to_row() for r in rows], RETURN_COLUMNS
        )
        self.sink.write_json(
            "evaluate/failing_variants.json",
            {
                "env": cfg.env,
                "trial": trial,
                "seed": seed,
                "baseline_mean_return": baseline,
                "threshold": rule.threshold(baseline),
                "failing_variants": failing,
            },
        )
        return {"variants": len(rows) - 1, "failing": len(failing)}

    def _result_rows(self, variant: str, result: AggregateResult) -> list[dict[str, Any]]:
        cfg = self.config
        aggregation = cfg.uncertainty.aggregation if self.policy_role == "q" else "action_std"
        return [
            {
                "env": cfg.env,
                "variant": variant,
                "method": cfg.uncertainty.method,
                "aggregation": aggregation,
                "trial": t.trial,
                "auc": t.auc,
                "best_threshold": t.best_threshold,
                "youden_j": t.youden_j,
                "n_id": t.n_id,
                "n_ood": t.n_ood,
                "seed": t.seed,
            }
            for t in result.trials
            if t.ok
        ]

    def _write_trace(
        self, method: UncertaintyMethod, spec: VariantSpec, result: AggregateResult
    ) -> None:
        cfg = self.config
        first = next(t for t in result.trials if t.ok)
        episode = cfg.evaluation.trace_episode
        if episode >= cfg.evaluation.episodes_per_side:
            logger.warning(f"Trace episode {episode} was not part of the AUC episodes")

        rows = trace_report(
            method,
            self.load_policy(first.trial),
            make_variant(cfg.env),
            spec.build(),
            episode,
            first.seed,
            first.best_threshold,
            cfg.uncertainty.greedy,
        )
        columns = list(rows[0]) if rows else ["label", "variant", "step", "score", "threshold"]
        self.sink.write_csv(
            f"detect/traces/{slug(spec.variant_id)}_trial_{first.trial:02d}.csv", rows, columns
        )

    def detect(self) -> dict[str, Any]:
        """AUC per trial and variant from the trained checkpoints

        Raises:
            ConfigError: If no variants are configured
            MethodError: If the method cannot score the checkpoints
        """
        cfg = self.config
        specs = cfg.variant_specs()
        if not specs:
            raise ConfigError("detect needs at least one variant")
        self.write_effective_config()
        method = UncertaintyMethod.from_config(cfg.uncertainty)

        rows: list[dict[str, Any]] = []
        aggregates: list[dict[str, Any]] = []
        for spec in specs:
            result = run_trials(
                cfg, spec.variant_id, model_provider=self.checkpoints, jobs=cfg.jobs
            )
            variant_rows = self._result_rows(spec.variant_id, result)
            rows.extend(variant_rows)
            aggregates.append(
                {
                    "env": cfg.env,
                    "variant": spec.variant_id,
                    "method": cfg.uncertainty.method,
                    "aggregation": variant_rows[0]["aggregation"],
                    **result.to_dict(),
                }
            )
            self._write_trace(method, spec, result)
            logger.info(
                f"{spec.variant_id}: AUC {result.mean_auc:.3f} ± {result.std_auc:.3f} "
                f"over {result.n_trials} trial(s)"
            )

        self.sink.write_csv("detect/results.csv", rows, RESULT_COLUMNS)
        self.sink.write_json("detect/aggregate.json", aggregates)
        return {"variants": len(specs), "rows": len(rows)}

    def preview_corruption(
        self,
        kind: str,
        severity: Optional[int] = None,
        value: Optional[str] = None,
        input_path: Optional[str | Path] = None,
    ) -> dict[str, Any]:
        """Write corrupted copies of one frame as PGM

        Without ``severity`` or ``value`` the whole severity grid is written.
        Without ``input_path`` a seeded MiniPong frame is rendered and saved
        as ``previews/input.pgm``.

        Raises:
            SpecError: On unknown kinds, severities or values
            DataError: If the input frame cannot be read
        """
        if value is not None:
            specs = [spec_from_value(kind, value)]
        elif severity is not None:
            specs = [severity_spec(kind, severity)]
        else:
            specs = severity_grid(kind)

        seed = self.config.base_seed
        if input_path is not None:
            path = Path(input_path)
            if not path.is_file():
                raise DataError(f"Input frame not found: {path}")
            frame = pgm_to_frame(path.read_bytes())
        else:
            frame = MiniPongEnv().reset(make_rng(seed, 0))[-1]
            self.sink.write_frame("previews/input.pgm", frame)

        written = []
        for i, spec in enumerate(specs):
            label = str(spec.severity) if spec.severity is not None else slug(spec.label)
            name = f"previews/{kind}_{label}.pgm"
            out = corrupt(frame, spec, make_rng(seed, 1 + KINDS.index(kind), i))
            written.append(self.sink.write_frame(name, out)["path"])
        return {"kind": kind, "files": len(written)}
