"""Configuration management for OODRL Bench

Experiments are described by an ``ExperimentConfig`` loaded from YAML or
JSON. Fields left unset (``None``) take per-environment defaults when the
config is ``resolved()``; the resolved config is what gets written next to
the results as ``effective_config.json``.
"""

import json
import logging
from pathlib import Path
from typing import Any, Literal, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..envs import ENV_IDS, VariantSpec, resolve_variant
from ..errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "config/experiment.yaml"

ENV_ALGORITHMS: dict[str, str] = {"cartpole": "dqn", "pendulum": "ddpg", "minipong": "dqn"}
DEFAULT_HIDDEN_DIMS: dict[str, list[int]] = {
    "cartpole": [64, 64],
    "pendulum": [64, 64],
    "minipong": [256, 256],
}
DEFAULT_TRAIN_STEPS: dict[str, int] = {"cartpole": 50_000, "pendulum": 30_000, "minipong": 200_000}
METHOD_LAYERS: dict[str, str] = {
    "mc_dropout": "dropout",
    "mc_dropconnect": "dropconnect",
    "ensemble": "none",
}

Method = Literal["mc_dropout", "mc_dropconnect", "ensemble"]
Aggregation = Literal["chosen_action_std", "max_action_std", "mean_action_std"]


class NetworkConfig(BaseModel):
    """Network architecture configuration"""

    hidden_dims: Optional[list[int]] = Field(
        default=None,
        description="Hidden layer widths (default [64, 64], [256, 256] for minipong)",
    )
    activation: Literal["relu", "tanh"] = Field(default="relu", description="Hidden activation")
    stochastic: Optional[Literal["none", "dropout", "dropconnect"]] = Field(
        default=None,
        description="Stochastic layer kind (default follows the uncertainty method)",
    )
    rate: float = Field(default=0.1, ge=0.0, lt=1.0, description="Dropout / DropConnect rate")

    @field_validator("hidden_dims")
    @classmethod
    def _positive_dims(cls, v: Optional[list[int]]) -> Optional[list[int]]:
        if v is not None and any(d < 1 for d in v):
            raise ValueError(f"hidden_dims must be positive, got {v}")
        return v


class AgentConfig(BaseModel):
    """RL training configuration"""

    algorithm: Optional[Literal["dqn", "ddpg"]] = Field(
        default=None, description="dqn for cartpole/minipong, ddpg for pendulum"
    )
    lr: float = Field(default=1e-3, gt=0, description="DQN learning rate")
    actor_lr: float = Field(default=1e-4, gt=0, description="DDPG actor learning rate")
    critic_lr: float = Field(default=1e-3, gt=0, description="DDPG critic learning rate")
    gamma: float = Field(default=0.99, gt=0.0, le=1.0, description="Discount factor")
    batch_size: int = Field(default=64, ge=1)
    buffer_capacity: int = Field(default=50_000, ge=1)
    learning_starts: int = Field(default=1_000, ge=0, description="Steps before the first update")
    target_update: Optional[Literal["hard", "soft"]] = Field(
        default=None, description="hard for dqn, soft for ddpg"
    )
    target_update_every: int = Field(default=500, ge=1, description="Hard update period (steps)")
    tau: float = Field(default=0.005, ge=0.0, le=1.0, description="Soft update coefficient")
    epsilon_start: float = Field(default=1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(default=0.05, ge=0.0, le=1.0)
    epsilon_decay_steps: int = Field(default=10_000, ge=1)
    action_noise: float = Field(
        default=0.1, ge=0.0, description="Gaussian exploration std as a fraction of max_torque"
    )
    train_steps: Optional[int] = Field(default=None, ge=1, description="Environment steps")
    grad_clip: float = Field(default=10.0, gt=0, description="Global gradient norm bound")
    eval_every: int = Field(
        default=5_000,
        ge=0,
        description="Greedy evaluation period; the best snapshot is kept (0 = off)",
    )
    eval_episodes: int = Field(default=5, ge=1)


class UncertaintyConfig(BaseModel):
    """Uncertainty scoring configuration"""

    method: Method = Field(default="ensemble")
    samples: int = Field(default=5, ge=2, description="K forward passes for MC methods")
    members: int = Field(default=5, ge=2, description="M ensemble members")
    aggregation: Aggregation = Field(
        default="chosen_action_std", description="Reduction of per-action stds (discrete control)"
    )
    greedy: bool = Field(default=True, description="Score greedy rollouts")


class EvaluationConfig(BaseModel):
    """Failure search and OOD detection configuration"""

    trials: int = Field(default=5, ge=1)
    episodes_per_side: int = Field(default=10, ge=1)
    threshold_rule: Literal["youden", "f1"] = Field(default="youden")
    failure_episodes: int = Field(default=10, ge=1, description="Episodes per variant in evaluate")
    trace_episode: int = Field(default=0, ge=0, description="Episode exported as a score trace")


class ExperimentConfig(BaseModel):
    """One experiment: environment, variants, agent, uncertainty method and protocol

    Example:
        >>> config = ExperimentConfig(env="cartpole", variants=["cartpole/length/2"])
        >>> config.resolved().agent.algorithm
        'dqn'
    """

    env: str = Field(default="cartpole", description="Training (in-distribution) environment id")
    variants: list[Union[str, dict[str, float]]] = Field(
        default_factory=list, description="Preset ids or override mappings"
    )
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    agent: AgentConfig = Field(default_factory=AgentConfig)
    uncertainty: UncertaintyConfig = Field(default_factory=UncertaintyConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    base_seed: int = Field(default=0, ge=0)
    output_dir: str = Field(default="runs/default")
    jobs: int = Field(default=1, ge=1, description="Worker processes for trials")
    log_level: str = Field(default="INFO")

    @field_validator("env")
    @classmethod
    def _known_env(cls, v: str) -> str:
        if v not in ENV_IDS:
            raise ValueError(f"Unknown environment '{v}'. Available: {', '.join(ENV_IDS)}")
        return v

    @model_validator(mode="after")
    def _check_references(self) -> "ExperimentConfig":
        for variant in self.variants:
            try:
                resolve_variant(variant, env_id=self.env)
            except ConfigError as e:
                raise ValueError(str(e)) from None

        expected = ENV_ALGORITHMS[self.env]
        if self.agent.algorithm is not None and self.agent.algorithm != expected:
            raise ValueError(
                f"{self.agent.algorithm} does not fit {self.env}; use {expected}"
            )
        return self

    @property
    def n_members(self) -> int:
        """Networks trained per trial"""
        return self.uncertainty.members if self.uncertainty.method == "ensemble" else 1

    def variant_specs(self) -> list[VariantSpec]:
        """Configured variants resolved against the registry"""
        return [resolve_variant(v, env_id=self.env) for v in self.variants]

    def resolved(self) -> "ExperimentConfig":
        """Copy with every per-environment default filled in"""
        algorithm = self.agent.algorithm or ENV_ALGORITHMS[self.env]
        network = self.network.model_copy(
            update={
                "hidden_dims": self.network.hidden_dims or list(DEFAULT_HIDDEN_DIMS[self.env]),
                "stochastic": self.network.stochastic or METHOD_LAYERS[self.uncertainty.method],
            }
        )
        agent = self.agent.model_copy(
            update={
                "algorithm": algorithm,
                "train_steps": self.agent.train_steps or DEFAULT_TRAIN_STEPS[self.env],
                "target_update": self.agent.target_update
                or ("hard" if algorithm == "dqn" else "soft"),
            }
        )
        return self.model_copy(update={"network": network, "agent": agent})

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Validated copy with top-level or ``section.field`` overrides; None values are skipped

        Example:
            >>> config.with_overrides(base_seed=3, **{"evaluation.trials": 2})
        """
        data = self.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            target = data
            *parents, leaf = key.split(".")
            for parent in parents:
                target = target[parent]
            target[leaf] = value
        return validate_config(data)


class Settings(BaseSettings):
    """Process-level settings read from ``OODRL_*`` environment variables or .env"""

    seed: Optional[int] = None
    log_level: Optional[str] = None
    log_format: Literal["text", "json"] = "text"
    output_dir: Optional[str] = None
    jobs: Optional[int] = None

    model_config = SettingsConfigDict(env_prefix="OODRL_", env_file=".env", extra="ignore")


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw mapping into an ExperimentConfig

    Raises:
        ConfigError: If validation fails
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config: {e}") from e


def load_config(config_file: str | Path = DEFAULT_CONFIG_FILE) -> ExperimentConfig:
    """Load an experiment from a YAML or JSON file

    Args:
        config_file: Path to the experiment file; relative paths are tried
            against the working directory, then the project root

    Returns:
        Validated (not yet resolved) ExperimentConfig

    Raises:
        ConfigError: If the file is missing, unparsable or invalid
    """
    load_dotenv()

    config_path = Path(config_file)
    if not config_path.is_absolute() and not config_path.exists():
        project_root = Path(__file__).parent.parent.parent
        config_path = project_root / config_path

    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_file}")

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            if config_path.suffix.lower() == ".json":
                data = json.load(f)
            else:
                data = yaml.safe_load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot parse {config_path}: {e}") from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{config_path} must contain a mapping, got {type(data).__name__}")

    logger.info(f"Loaded experiment config from {config_path}")
    return validate_config(data)


__all__ = [
    "AgentConfig",
    "DEFAULT_CONFIG_FILE",
    "ENV_ALGORITHMS",
    "EvaluationConfig",
    "ExperimentConfig",
    "NetworkConfig",
    "Settings",
    "UncertaintyConfig",
    "load_config",
    "validate_config",
]
