"""Uniform experience replay over preallocated ring arrays"""

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError


@dataclass(frozen=True)
class Transition:
    """One environment step, observations already encoded"""

    obs: np.ndarray
    action: np.ndarray | int | float
    reward: float
    next_obs: np.ndarray
    terminated: bool


@dataclass(frozen=True)
class Batch:
    """Sampled transitions as stacked float64 arrays"""

    obs: np.ndarray
    actions: np.ndarray  # (B,) for discrete, (B, action_dim) for continuous
    rewards: np.ndarray
    next_obs: np.ndarray
    terminated: np.ndarray


class ReplayBuffer:
    """Fixed-capacity ring buffer

    Once full, each insert overwrites the oldest transition. Sampling is
    uniform with replacement over the current contents.

    Example:
        >>> buffer = ReplayBuffer(capacity=1000, obs_dim=4)
        >>> buffer.push(Transition(obs, 1, 1.0, next_obs, False))
        >>> batch = buffer.sample(64, rng)
    """

    def __init__(
        self,
        capacity: int,
        obs_dim: int,
        action_dim: int = 0,
        obs_dtype: type = np.float64,
    ):
        """Initialize ReplayBuffer

        Args:
            capacity: Maximum number of stored transitions
            obs_dim: Encoded observation width
            action_dim: 0 for discrete (integer) actions, else continuous action width
            obs_dtype: Storage dtype for observations (float16 halves pixel memory)
        """
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self.obs_dim = int(obs_dim)
        self.action_dim = int(action_dim)

        self._obs = np.zeros((self.capacity, self.obs_dim), dtype=obs_dtype)
        self._next_obs = np.zeros((self.capacity, self.obs_dim), dtype=obs_dtype)
        if self.action_dim:
            self._actions = np.zeros((self.capacity, self.action_dim), dtype=np.float64)
        else:
            self._actions = np.zeros(self.capacity, dtype=np.int64)
        self._rewards = np.zeros(self.capacity, dtype=np.float64)
        self._terminated = np.zeros(self.capacity, dtype=np.float64)

        self._next = 0
        self._size = 0
        self.total_pushed = 0

    @property
    def obs_dtype(self) -> np.dtype:
        return self._obs.dtype

    def __len__(self) -> int:
        return self._size

    def push(self, transition: Transition) -> None:
        """Store a transition, evicting the oldest when full"""
        obs = np.asarray(transition.obs).reshape(-1)
        next_obs = np.asarray(transition.next_obs).reshape(-1)
        if obs.shape[0] != self.obs_dim or next_obs.shape[0] != self.obs_dim:
            raise ShapeError(f"Observation width {obs.shape[0]} != buffer width {self.obs_dim}")

        i = self._next
        self._obs[i] = obs
        self._next_obs[i] = next_obs
        if self.action_dim:
            self._actions[i] = np.asarray(transition.action, dtype=np.float64).reshape(-1)
        else:
            self._actions[i] = int(transition.action)
        self._rewards[i] = float(transition.reward)
        self._terminated[i] = float(bool(transition.terminated))

        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)
        self.total_pushed += 1

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Draw ``batch_size`` transitions uniformly with replacement

        Raises:
            ValueError: If the buffer is empty
        """
        if self._size == 0:
            raise ValueError("Cannot sample from an empty replay buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        return Batch(
            obs=self._obs[idx].astype(np.float64),
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_obs=self._next_obs[idx].astype(np.float64),
            terminated=self._terminated[idx],
        )

    def contents(self) -> list[Transition]:
        """Stored transitions, oldest first"""
        start = self._next if self._size == self.capacity else 0
        order = [(start + k) % self.capacity for k in range(self._size)]
        return [
            Transition(
                obs=self._obs[i].astype(np.float64),
                action=self._actions[i].copy() if self.action_dim else int(self._actions[i]),
                reward=float(self._rewards[i]),
                next_obs=self._next_obs[i].astype(np.float64),
                terminated=bool(self._terminated[i]),
            )
            for i in order
        ]
