"""Adam optimizer over Network parameters"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError, TrainingError
from .network import Gradients, Network

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """First/second moment estimates and step count for one network"""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_network(cls, net: Network, **kwargs) -> "AdamState":
        params = net.parameters()
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
            **kwargs,
        )


def sgd_adam_step(net: Network, grads: Gradients, opt_state: AdamState, lr: float) -> None:
    """Apply one bias-corrected Adam update to ``net`` in place

    Parameters and moment buffers are modified in place and ``net`` is marked
    updated, which invalidates tapes recorded before the step.

    Raises:
        ShapeError: If gradient shapes do not match the parameters
        TrainingError: If any gradient is non-finite; nothing is modified
    """
    params = net.parameters()
    grad_arrays = grads.arrays()
    if len(grad_arrays) != len(params):
        raise ShapeError(f"Expected {len(params)} gradient arrays, got {len(grad_arrays)}")
    for p, g in zip(params, grad_arrays):
        if p.shape != g.shape:
            raise ShapeError(f"Gradient shape {g.shape} != parameter shape {p.shape}")
    if not grads.is_finite():
        raise TrainingError("Non-finite gradients, optimizer step skipped")

    if not opt_state.m:
        opt_state.m = [np.zeros_like(p) for p in params]
        opt_state.v = [np.zeros_like(p) for p in params]

    opt_state.t += 1
    b1, b2 = opt_state.beta1, opt_state.beta2
    correction1 = 1.0 - b1**opt_state.t
    correction2 = 1.0 - b2**opt_state.t

    for p, g, m, v in zip(params, grad_arrays, opt_state.m, opt_state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        p -= lr * m_hat / (np.sqrt(v_hat) + opt_state.eps)

    net.mark_updated()
