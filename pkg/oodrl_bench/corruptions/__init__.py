"""Gaussian, impulse, motion-blur and pixelate corruptions with severity grids"""

from .core import (
    KINDS,
    CorruptionSpec,
    corrupt,
    motion_blur_kernel,
    pixelate,
    severity_grid,
    severity_spec,
    spec_from_value,
)

__all__ = [
    "KINDS",
    "CorruptionSpec",
    "corrupt",
    "motion_blur_kernel",
    "pixelate",
    "severity_grid",
    "severity_spec",
    "spec_from_value",
]
