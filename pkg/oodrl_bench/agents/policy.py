"""Acting with trained networks"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..errors import SpecError
from ..nncore import Checkpoint, Network, StochasticMode, forward
from .encoding import encode_observation


@dataclass
class Policy:
    """One network or an ensemble, plus how to turn outputs into actions

    Discrete policies take the argmax of the (member-mean) Q values;
    continuous policies return the member-mean actor output clipped to the
    actor bound.

    Attributes:
        networks: Q networks or actors; more than one for ensembles
        discrete: True for Q networks
    """

    networks: list[Network]
    discrete: bool

    def __post_init__(self) -> None:
        if not self.networks:
            raise SpecError("A policy needs at least one network")
        first = self.networks[0].spec
        for net in self.networks[1:]:
            if (net.spec.input_dim, net.spec.output_dim) != (first.input_dim, first.output_dim):
                raise SpecError("Policy members must share input and output widths")

    @classmethod
    def from_checkpoints(cls, checkpoints: Sequence[Checkpoint]) -> "Policy":
        """Rebuild a policy; tanh-bounded outputs mark actors"""
        networks = [c.network for c in checkpoints]
        if not networks:
            raise SpecError("A policy needs at least one checkpoint")
        discrete = networks[0].spec.output_activation != "tanh_scaled"
        return cls(networks=networks, discrete=discrete)

    @property
    def bound(self) -> Optional[float]:
        return self.networks[0].spec.output_bound

    @staticmethod
    def encode(obs: np.ndarray) -> np.ndarray:
        return encode_observation(obs)

    def member_outputs(self, x: np.ndarray, rng: Any = None) -> np.ndarray:
        """(M, output_dim) outputs for an encoded input; masks sampled only when ``rng`` is given"""
        mode = StochasticMode.sampled(rng) if rng is not None else StochasticMode.deterministic()
        return np.stack([forward(net, x, mode)[0] for net in self.networks])

    def action_from_outputs(self, mean_output: np.ndarray) -> Any:
        if self.discrete:
            return int(np.argmax(mean_output))
        return np.clip(mean_output, -self.bound, self.bound)

    def act(self, obs: np.ndarray, rng: Any = None) -> tuple[Any, np.ndarray]:
        """Action for a raw observation plus the member-mean network output"""
        mean_output = self.member_outputs(self.encode(obs), rng).mean(axis=0)
        return self.action_from_outputs(mean_output), mean_output
