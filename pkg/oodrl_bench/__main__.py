"""OODRL Bench CLI Entry Point

Usage:
    python -m oodrl_bench --config config/experiment.yaml train
    python -m oodrl_bench --config config/experiment.yaml evaluate
    python -m oodrl_bench --config config/experiment.yaml detect
    python -m oodrl_bench --out runs/cartpole_ensemble report
    python -m oodrl_bench report runs/cartpole_ensemble runs/cartpole_mc_dropout
    python -m oodrl_bench preview-corruption gaussian
    python -m oodrl_bench list-envs
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, NoReturn, Optional

import pandas as pd
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from oodrl_bench.config import DEFAULT_CONFIG_FILE, ENV_ALGORITHMS, Settings, load_config
from oodrl_bench.envs import ENV_IDS, list_presets, make_env
from oodrl_bench.errors import (
    CheckpointError,
    ConfigError,
    DataError,
    MethodError,
    SpecError,
    TrainingError,
)
from oodrl_bench.pipeline import (
    ExperimentOrchestrator,
    StageRun,
    best_per_method,
    load_results,
    summarize,
)
from oodrl_bench.utils import setup_logger

app = typer.Typer(help="OODRL Bench - OOD detection benchmark for deep RL")
console = Console()

logger = logging.getLogger(__name__)

USER_ERRORS = (ConfigError, SpecError, MethodError, CheckpointError, DataError)


@dataclass
class CliState:
    """Global options shared by every command"""

    config_file: Path
    seed: Optional[int]
    out: Optional[Path]
    trials: Optional[int]
    jobs: Optional[int]
    log_level: Optional[str]


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, TrainingError):
        return 3
    if isinstance(exc, USER_ERRORS):
        return 2
    return 1


def _fail(exc: Exception, what: str) -> NoReturn:
    console.print(f"\n[bold red]❌ Error: {exc}[/bold red]\n")
    code = _exit_code(exc)
    if code == 1:
        logger.error(f"{what} failed: {exc}", exc_info=True)
    else:
        logger.error(f"{what} failed: {exc}")
    raise typer.Exit(code=code)


def _orchestrator(ctx: typer.Context) -> ExperimentOrchestrator:
    """Config from file, then Settings (OODRL_* env / .env), then flags"""
    state: CliState = ctx.obj
    try:
        settings = Settings()
    except ValidationError as e:
        raise ConfigError(f"Invalid OODRL_* settings: {e}") from e
    config = load_config(state.config_file)

    seed = state.seed if state.seed is not None else settings.seed
    out = state.out if state.out is not None else settings.output_dir
    jobs = state.jobs if state.jobs is not None else settings.jobs
    config = config.with_overrides(
        base_seed=seed,
        output_dir=str(out) if out is not None else None,
        jobs=jobs,
        **{"evaluation.trials": state.trials},
    )

    level = state.log_level or settings.log_level or config.log_level
    setup_logger("oodrl_bench", level, settings.log_format)
    return ExperimentOrchestrator(config)


def _print_stage(run: StageRun) -> None:
    if run.status == "completed":
        details = ", ".join(f"{k}={v}" for k, v in run.summary.items())
        console.print(f"  [green]✅ {run.name}[/green]: {details}")
    else:
        console.print(f"  [red]❌ {run.name}[/red]: {run.error_message or 'Unknown error'}")


def _run(ctx: typer.Context, stage: str, title: str, **kwargs) -> ExperimentOrchestrator:
    console.print(f"\n[bold blue]🚀 OODRL Bench - {title}[/bold blue]\n")
    try:
        orchestrator = _orchestrator(ctx)
        run = orchestrator.run_stage(stage, **kwargs)
        _print_stage(run)
        console.print(f"\n[bold green]✅ Outputs in {orchestrator.sink.output_dir}[/bold green]\n")
        return orchestrator
    except Exception as e:
        _fail(e, stage)


@app.callback()
def main(
    ctx: typer.Context,
    config_file: Path = typer.Option(
        DEFAULT_CONFIG_FILE, "--config", "-c", help="Experiment file (YAML or JSON)"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed (env OODRL_SEED)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory"),
    trials: Optional[int] = typer.Option(None, "--trials", min=1, help="Number of trials"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Worker processes"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING"),
):
    """Global options"""
    ctx.obj = CliState(config_file, seed, out, trials, jobs, log_level)


@app.command()
def train(ctx: typer.Context):
    """Train the models of every trial"""
    _run(ctx, "train", "Training")


@app.command()
def evaluate(ctx: typer.Context):
    """Find the variants where the trained agent fails"""
    orchestrator = _run(ctx, "evaluate", "Evaluating variants")
    try:
        frame = pd.read_csv(orchestrator.sink.path("evaluate/variant_returns.csv"))
    except (OSError, pd.errors.ParserError) as e:
        _fail(DataError(f"Cannot read variant returns: {e}"), "evaluate")

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Variant", style="cyan")
    table.add_column("Mean return", justify="right")
    table.add_column("Std", justify="right")
    table.add_column("Status", justify="center")
    for row in frame.itertuples(index=False):
        if row.is_baseline:
            status = "[blue]baseline[/blue]"
        else:
            status = "[red]failing[/red]" if row.failing else "[green]ok[/green]"
        table.add_row(row.variant, f"{row.mean_return:.2f}", f"{row.std_return:.2f}", status)
    console.print(table)


@app.command()
def detect(ctx: typer.Context):
    """Score ID vs OOD observations and compute AUC per trial"""
    _run(ctx, "detect", "OOD detection")


@app.command()
def report(
    ctx: typer.Context,
    runs: Optional[List[Path]] = typer.Argument(
        None, help="Output directories to compare; defaults to --out or the config's output_dir"
    ),
):
    """Per-trial AUCs with mean ± std, then the best variant per (env, method)"""
    try:
        dirs = list(runs) if runs else [_orchestrator(ctx).sink.output_dir]
        summary = summarize(load_results(dirs))
        best = best_per_method(summary)
    except Exception as e:
        _fail(e, "report")
    compare = len(dirs) > 1

    table = Table(show_header=True, header_style="bold magenta")
    if compare:
        table.add_column("Run", style="dim")
    table.add_column("Env", style="cyan")
    table.add_column("Variant", style="cyan")
    table.add_column("Method")
    table.add_column("Trial AUCs")
    table.add_column("Mean AUC ± Std", justify="right")
    for row in summary.itertuples(index=False):
        cells = [row.env, row.variant, row.method, " ".join(f"{a:.3f}" for a in row.trial_aucs)]
        cells.append(f"{row.mean_auc:.3f} ± {row.std_auc:.3f}")
        table.add_row(*([row.run] if compare else []), *cells)
    console.print(table)

    best_table = Table(title="Best AUC per method", show_header=True, header_style="bold magenta")
    best_table.add_column("Env", style="cyan")
    best_table.add_column("Method")
    if compare:
        best_table.add_column("Run", style="dim")
    best_table.add_column("Best variant", style="cyan")
    best_table.add_column("Mean AUC ± Std", justify="right")
    for row in best.itertuples(index=False):
        best_table.add_row(
            row.env,
            row.method,
            *([row.run] if compare else []),
            row.variant,
            f"[green]{row.mean_auc:.3f}[/green] ± {row.std_auc:.3f}",
        )
    console.print(best_table)


@app.command("preview-corruption")
def preview_corruption(
    ctx: typer.Context,
    kind: str = typer.Argument(..., help="gaussian, impulse, motion_blur or pixelate"),
    severity: Optional[int] = typer.Option(None, "--severity", "-s", help="Single level 1-5"),
    value: Optional[str] = typer.Option(
        None, "--value", help="Explicit parameter, e.g. 0.3 or 15,8 for motion_blur"
    ),
    input_path: Optional[Path] = typer.Option(None, "--input", "-i", help="Input PGM frame"),
):
    """Write corrupted copies of a frame as PGM, one per severity"""
    _run(
        ctx,
        "preview",
        f"Corruption preview: {kind}",
        kind=kind,
        severity=severity,
        value=value,
        input_path=input_path,
    )


@app.command("list-envs")
def list_envs(
    env: Optional[str] = typer.Option(None, "--env", "-e", help="List one env's variant presets"),
):
    """Show environments and their OOD variant presets"""
    try:
        if env is not None:
            presets = list_presets(env)
            for variant_id in presets:
                console.print(variant_id)
            return

        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Env", style="cyan")
        table.add_column("Algorithm")
        table.add_column("Action space")
        table.add_column("Presets", justify="right")
        for env_id in ENV_IDS:
            kind = make_env(env_id).action_space.kind
            n_presets = len(list_presets(env_id))
            table.add_row(env_id, ENV_ALGORITHMS[env_id], kind, str(n_presets))
        console.print(table)
    except Exception as e:
        _fail(e, "list-envs")


if __name__ == "__main__":
    app()
