"""Utils module

Export commonly used utilities
"""

from .logger import logger_settings, setup_logger
from .seeding import derive_seed, make_rng, member_seed, spawn_rngs, trial_seed

__all__ = [
    # Logger
    "logger_settings",
    "setup_logger",
    # Seeding
    "derive_seed",
    "make_rng",
    "member_seed",
    "spawn_rngs",
    "trial_seed",
]
