"""
Per-step score collection on ID / OOD environment pairs

Every episode gets its own random streams, derived from
``(trial seed, side, episode index)``, for its reset, its score masks and
(non-greedy runs) its acting masks. Re-running one episode for a trace
therefore reproduces the exact episode that fed the AUC.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Literal, Optional

import numpy as np

from ..agents import Episode, Policy
from ..envs import Environment
from ..uncertainty import StepScore, UncertaintyMethod, check_compatible, score_observation
from ..utils import derive_seed, spawn_rngs

logger = logging.getLogger(__name__)

SIDES = ("id", "ood")
SAMPLE_COLUMNS = ["env", "variant", "label", "trial", "episode", "step", "score"]

Label = Literal["id", "ood"]


@dataclass(frozen=True)
class ScoreSample:
    """One timestep's uncertainty score with its label and provenance"""

    score: float
    label: Label
    env: str
    variant: str
    trial: int
    episode: int
    step: int

    def to_row(self) -> dict[str, Any]:
        return {
            "env": self.env,
            "variant": self.variant,
            "label": self.label,
            "trial": self.trial,
            "episode": self.episode,
            "step": self.step,
            "score": self.score,
        }


@dataclass
class ScoredEpisode:
    """An episode together with the score of every step"""

    episode: Episode
    scores: list[StepScore] = field(default_factory=list)

    @property
    def length(self) -> int:
        return self.episode.length


def episode_streams(trial_seed: int, side: Label, episode: int) -> dict[str, np.random.Generator]:
    """reset / scores / acting streams of one episode"""
    seed = derive_seed(trial_seed, SIDES.index(side), episode)
    return spawn_rngs(seed, ("reset", "scores", "acting"))


def run_scored_episode(
    method: UncertaintyMethod,
    policy: Policy,
    env: Environment,
    streams: dict[str, np.random.Generator],
    greedy: bool = True,
) -> ScoredEpisode:
    """Act with ``policy`` and score every observation it acts on

    Greedy runs act on the deterministic (mask-free) output; otherwise
    acting passes sample their own masks.
    """
    acting_rng: Optional[np.random.Generator] = None if greedy else streams["acting"]
    scored = ScoredEpisode(Episode())
    obs = env.reset(streams["reset"])
    while True:
        x = policy.encode(obs)
        scored.scores.append(
            score_observation(method, policy.networks, x, streams["scores"], policy.discrete)
        )
        action, output = policy.act(obs, acting_rng)
        result = env.step(action)

        episode = scored.episode
        episode.observations.append(obs)
        episode.actions.append(action)
        episode.rewards.append(float(result.reward))
        episode.outputs.append(output)
        if result.done:
            episode.terminated = result.terminated
            episode.truncated = result.truncated
            return scored
        obs = result.obs


def collect_scores(
    method: UncertaintyMethod,
    policy: Policy,
    id_env: Environment,
    ood_env: Environment,
    episodes: int,
    trial_seed: int,
    trial: int = 0,
    greedy: bool = True,
) -> list[ScoreSample]:
    """Labeled per-step scores from ``episodes`` episodes on each side

    Args:
        method: Uncertainty method
        policy: Trained network(s); MC methods expect one network
        id_env: Default environment (label "id")
        ood_env: Variant environment (label "ood")
        episodes: Episodes per side
        trial_seed: Seed the episode streams derive from
        trial: Trial index recorded in the samples
        greedy: Act without sampling masks

    Raises:
        MethodError: If the method cannot score ``policy``

    Example:
        >>> samples = collect_scores(method, policy, make_env("cartpole"),
        ...                          make_env("cartpole/length/2"), 10, trial_seed=0)
    """
    check_compatible(method, policy.networks)
    samples: list[ScoreSample] = []
    for side, env in zip(SIDES, (id_env, ood_env)):
        for ep in range(int(episodes)):
            scored = run_scored_episode(
                method, policy, env, episode_streams(trial_seed, side, ep), greedy
            )
            samples.extend(
                ScoreSample(
                    score=s.score,
                    label=side,
                    env=env.env_id,
                    variant=env.variant_id,
                    trial=trial,
                    episode=ep,
                    step=t,
                )
                for t, s in enumerate(scored.scores)
            )
            logger.debug(f"{env.variant_id} {side} episode {ep}: {scored.length} steps")

    n_ood = sum(1 for s in samples if s.label == "ood")
    logger.info(
        f"Collected {len(samples) - n_ood} ID / {n_ood} OOD scores "
        f"({id_env.variant_id} vs {ood_env.variant_id}, trial {trial})"
    )
    return samples


def split_scores(samples: list[ScoreSample]) -> tuple[np.ndarray, np.ndarray]:
    """(id scores, ood scores)"""
    id_scores = np.array([s.score for s in samples if s.label == "id"], dtype=np.float64)
    ood_scores = np.array([s.score for s in samples if s.label == "ood"], dtype=np.float64)
    return id_scores, ood_scores


def episode_means(samples: list[ScoreSample]) -> tuple[np.ndarray, np.ndarray]:
    """Mean score per episode, split into (id, ood)"""
    sums: dict[tuple[str, int], list[float]] = {}
    for s in samples:
        sums.setdefault((s.label, s.episode), []).append(s.score)
    id_means = [np.mean(v) for (label, _), v in sorted(sums.items()) if label == "id"]
    ood_means = [np.mean(v) for (label, _), v in sorted(sums.items()) if label == "ood"]
    return np.array(id_means, dtype=np.float64), np.array(ood_means, dtype=np.float64)


def trace_report(
    method: UncertaintyMethod,
    policy: Policy,
    id_env: Environment,
    ood_env: Environment,
    episode: int,
    trial_seed: int,
    threshold: float,
    greedy: bool = True,
) -> list[dict[str, Any]]:
    """Per-step rows behind a score-vs-threshold plot, one ID and one OOD episode

    Columns: label, step, mean_<i>, std_<i> per network output, score,
    threshold and whether the score is at or above it.
    """
    check_compatible(method, policy.networks)
    rows: list[dict[str, Any]] = []
    for side, env in zip(SIDES, (id_env, ood_env)):
        scored = run_scored_episode(
            method, policy, env, episode_streams(trial_seed, side, episode), greedy
        )
        for t, s in enumerate(scored.scores):
            row: dict[str, Any] = {"label": side, "variant": env.variant_id, "step": t}
            row.update({f"mean_{i}": float(v) for i, v in enumerate(s.mean)})
            row.update({f"std_{i}": float(v) for i, v in enumerate(s.std)})
            row.update({"score": s.score, "threshold": threshold, "flagged": s.score >= threshold})
            rows.append(row)
    return rows
