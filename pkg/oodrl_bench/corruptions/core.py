"""Observation corruptions for pixel frames

Frames are 2-D float arrays (rows = height, columns = width) with values in
[0, 1]. Every corruption returns a new array of the same shape, clamped to
[0, 1]; the input is never modified.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from ..errors import ShapeError, SpecError

logger = logging.getLogger(__name__)

KINDS = ("gaussian", "impulse", "motion_blur", "pixelate")

# Severity i + 1 is grid index i
_SEVERITY_GRIDS: dict[str, list[dict]] = {
    "gaussian": [{"sigma": s} for s in (0.08, 0.12, 0.18, 0.26, 0.38)],
    "impulse": [{"p": p} for p in (0.03, 0.06, 0.09, 0.17, 0.27)],
    "motion_blur": [
        {"rho": r, "sigma": s} for r, s in ((10, 3), (15, 5), (15, 8), (15, 12), (20, 15))
    ],
    "pixelate": [{"f": f} for f in (0.6, 0.5, 0.4, 0.3, 0.25)],
}


@dataclass(frozen=True)
class CorruptionSpec:
    """Corruption kind and its parameters

    Attributes:
        kind: "gaussian", "impulse", "motion_blur" or "pixelate"
        sigma: Noise std (gaussian) or kernel std (motion_blur), >= 0
        p: Fraction of pixels replaced by salt or pepper (impulse), in [0, 1]
        rho: Kernel radius (motion_blur), kernel side is 2 * rho + 1
        f: Downscale factor (pixelate), in (0, 1]
        severity: Optional severity label 1..5
    """

    kind: str
    sigma: float = 0.0
    p: float = 0.0
    rho: int = 0
    f: float = 1.0
    severity: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SpecError(
                f"Unknown corruption kind: {self.kind!r}. Available: {', '.join(KINDS)}"
            )
        if not self.sigma >= 0:
            raise SpecError(f"sigma must be >= 0, got {self.sigma}")
        if not 0.0 <= self.p <= 1.0:
            raise SpecError(f"p must be in [0, 1], got {self.p}")
        if self.rho < 0 or int(self.rho) != self.rho:
            raise SpecError(f"rho must be a non-negative integer, got {self.rho}")
        if not 0.0 < self.f <= 1.0:
            raise SpecError(f"f must be in (0, 1], got {self.f}")
        if self.severity is not None and not 1 <= self.severity <= 5:
            raise SpecError(f"severity must be in 1..5, got {self.severity}")
        object.__setattr__(self, "rho", int(self.rho))

    @classmethod
    def gaussian(cls, sigma: float) -> "CorruptionSpec":
        return cls(kind="gaussian", sigma=float(sigma))

    @classmethod
    def impulse(cls, p: float) -> "CorruptionSpec":
        return cls(kind="impulse", p=float(p))

    @classmethod
    def motion_blur(cls, rho: int, sigma: float) -> "CorruptionSpec":
        return cls(kind="motion_blur", rho=int(rho), sigma=float(sigma))

    @classmethod
    def pixelate(cls, f: float) -> "CorruptionSpec":
        return cls(kind="pixelate", f=float(f))

    @property
    def label(self) -> str:
        """Short human-readable parameter label, e.g. ``rho=15,sigma=8``"""
        if self.kind == "gaussian":
            return f"sigma={self.sigma:g}"
        if self.kind == "impulse":
            return f"p={self.p:g}"
        if self.kind == "motion_blur":
            return f"rho={self.rho},sigma={self.sigma:g}"
        return f"f={self.f:g}"


def severity_grid(kind: str) -> list[CorruptionSpec]:
    """The five severity levels of a corruption kind, mildest first"""
    if kind not in _SEVERITY_GRIDS:
        raise SpecError(f"Unknown corruption kind: {kind!r}. Available: {', '.join(KINDS)}")
    return [
        CorruptionSpec(kind=kind, severity=i + 1, **params)
        for i, params in enumerate(_SEVERITY_GRIDS[kind])
    ]


def severity_spec(kind: str, severity: int) -> CorruptionSpec:
    """Grid entry for severity 1..5"""
    grid = severity_grid(kind)
    if not 1 <= severity <= len(grid):
        raise SpecError(f"severity must be in 1..{len(grid)}, got {severity}")
    return grid[severity - 1]


def spec_from_value(kind: str, value: str) -> CorruptionSpec:
    """Parse an explicit parameter value

    gaussian/impulse/pixelate take one number; motion_blur takes ``rho,sigma``.
    """
    try:
        if kind == "motion_blur":
            rho, sigma = (v.strip() for v in value.split(","))
            return CorruptionSpec.motion_blur(int(rho), float(sigma))
        number = float(value)
    except ValueError as e:
        raise SpecError(f"Cannot parse {kind} value {value!r}: {e}") from e
    if kind == "gaussian":
        return CorruptionSpec.gaussian(number)
    if kind == "impulse":
        return CorruptionSpec.impulse(number)
    if kind == "pixelate":
        return CorruptionSpec.pixelate(number)
    raise SpecError(f"Unknown corruption kind: {kind!r}. Available: {', '.join(KINDS)}")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def motion_blur_kernel(rho: int, sigma: float, angle: float) -> np.ndarray:
    """(2 rho + 1)^2 kernel holding a normalized 1-D Gaussian along a line

    The line passes through the kernel center at ``angle`` radians from the
    horizontal axis. Entries are non-negative and sum to 1.
    """
    size = 2 * rho + 1
    t = np.arange(-rho, rho + 1, dtype=np.float64)
    if sigma > 0:
        with np.errstate(over="ignore"):
            weights = np.exp(-0.5 * (t / sigma) ** 2)
    else:
        weights = (t == 0).astype(np.float64)
    weights /= weights.sum()

    kernel = np.zeros((size, size), dtype=np.float64)
    rows = rho + np.rint(t * math.sin(angle)).astype(int)
    cols = rho + np.rint(t * math.cos(angle)).astype(int)
    np.add.at(kernel, (rows, cols), weights)
    return kernel


def _area_matrix(src: int, dst: int) -> np.ndarray:
    """(dst, src) matrix averaging src cells into dst equal-width bins; rows sum to 1"""
    scale = src / dst
    matrix = np.zeros((dst, src), dtype=np.float64)
    for i in range(dst):
        lo, hi = i * scale, (i + 1) * scale
        for j in range(int(math.floor(lo)), min(int(math.ceil(hi)), src)):
            overlap = min(hi, j + 1) - max(lo, j)
            if overlap > 0:
                matrix[i, j] = overlap / scale
    return matrix


def _nearest_index(dst: int, src: int) -> np.ndarray:
    return np.minimum(((np.arange(dst) + 0.5) * src / dst).astype(int), src - 1)


def pixelate(frame: np.ndarray, f: float) -> np.ndarray:
    """Area-average downscale to (round(f h), round(f w)), nearest-neighbour upscale back"""
    h, w = frame.shape
    if f == 1.0:
        return frame.copy()
    dh = max(1, _round_half_up(f * h))
    dw = max(1, _round_half_up(f * w))
    small = _area_matrix(h, dh) @ frame @ _area_matrix(w, dw).T
    return small[np.ix_(_nearest_index(h, dh), _nearest_index(w, dw))]


def corrupt(frame: np.ndarray, spec: CorruptionSpec, rng: np.random.Generator) -> np.ndarray:
    """Apply one corruption to a grayscale frame

    Args:
        frame: 2-D array with values in [0, 1]
        spec: Corruption to apply
        rng: Stream for noise, pixel positions and blur angle

    Returns:
        Corrupted copy of ``frame``, clamped to [0, 1]

    Raises:
        ShapeError: If the frame is not 2-D or has zero size
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2 or frame.size == 0:
        raise ShapeError(f"Expected a non-empty 2-D frame, got shape {frame.shape}")

    if spec.kind == "gaussian":
        if spec.sigma == 0:
            return frame.copy()
        out = frame + rng.normal(0.0, spec.sigma, size=frame.shape)

    elif spec.kind == "impulse":
        out = frame.copy()
        n = _round_half_up(spec.p * frame.size)
        if n:
            positions = rng.choice(frame.size, size=n, replace=False)
            salt = rng.random(n) < 0.5
            out.reshape(-1)[positions] = np.where(salt, 1.0, 0.0)

    elif spec.kind == "motion_blur":
        angle = rng.uniform(-math.pi / 4, math.pi / 4)
        kernel = motion_blur_kernel(spec.rho, spec.sigma, angle)
        out = ndimage.convolve(frame, kernel, mode="nearest")

    else:
        out = pixelate(frame, spec.f)

    return np.clip(out, 0.0, 1.0)
