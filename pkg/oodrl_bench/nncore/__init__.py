"""Dense network engine: forward/backward passes, stochastic layers, Adam, checkpoints"""

from .checkpoint import (
    Checkpoint,
    checkpoint_from_bytes,
    checkpoint_to_bytes,
    load_checkpoint,
    save_checkpoint,
)
from .network import (
    Gradients,
    Network,
    NetworkSpec,
    StochasticMode,
    Tape,
    backward,
    clone_perturb_free,
    forward,
    hard_update,
    init_network,
    soft_update,
)
from .optim import AdamState, sgd_adam_step

__all__ = [
    "AdamState",
    "Checkpoint",
    "Gradients",
    "Network",
    "NetworkSpec",
    "StochasticMode",
    "Tape",
    "backward",
    "checkpoint_from_bytes",
    "checkpoint_to_bytes",
    "clone_perturb_free",
    "forward",
    "hard_update",
    "init_network",
    "load_checkpoint",
    "save_checkpoint",
    "sgd_adam_step",
    "soft_update",
]
