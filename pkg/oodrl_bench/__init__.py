"""OODRL Bench - Out-of-distribution detection benchmark for deep RL

This package provides:
- A small numpy neural-network engine with Dropout / DropConnect layers
- Cartpole, Pendulum and MiniPong environments with settable physics
- Gaussian / impulse / motion-blur / pixelate observation corruptions
- DQN and DDPG trainers
- MC Dropout, MC DropConnect and ensemble uncertainty scores
- ROC/AUC evaluation over repeated trials

Usage:
    # Train models for every trial
    python -m oodrl_bench --config config/experiment.yaml train

    # Find the variants where the trained agent fails
    python -m oodrl_bench --config config/experiment.yaml evaluate

    # Score ID vs OOD observations and report AUC
    python -m oodrl_bench --config config/experiment.yaml detect
"""

__version__ = "0.1.0"
__author__ = "OODRL Bench Team"
