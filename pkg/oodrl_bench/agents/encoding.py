"""Observation encoding for dense networks

Vector observations pass through unchanged. Pixel stacks are area-averaged
over 4x4 blocks (84x84 -> 21x21) and flattened, so corruption is applied at
full resolution before the downsample.
"""

import numpy as np

from ..envs import Environment
from ..errors import ShapeError

DOWNSAMPLE = 4


def encode_observation(obs: np.ndarray) -> np.ndarray:
    """Flat float64 network input for one observation

    Args:
        obs: 1-D vector or (stack, size, size) pixel stack

    Raises:
        ShapeError: For other ranks or frames smaller than one block
    """
    arr = np.asarray(obs, dtype=np.float64)
    if arr.ndim == 1:
        return arr
    if arr.ndim != 3:
        raise ShapeError(f"Cannot encode observation of shape {arr.shape}")

    stack, h, w = arr.shape
    bh, bw = h // DOWNSAMPLE, w // DOWNSAMPLE
    if bh == 0 or bw == 0:
        raise ShapeError(
            f"Frames of shape {(h, w)} are smaller than a {DOWNSAMPLE}x{DOWNSAMPLE} block"
        )
    # trailing rows/columns that do not fill a block are dropped
    cropped = arr[:, : bh * DOWNSAMPLE, : bw * DOWNSAMPLE]
    blocks = cropped.reshape(stack, bh, DOWNSAMPLE, bw, DOWNSAMPLE).mean(axis=(2, 4))
    return blocks.reshape(-1)


def encoded_dim(env: Environment) -> int:
    """Network input width for ``env``"""
    shape = getattr(env, "observation_shape", None)
    if shape is None:
        return env.observation_dim
    stack, h, w = shape
    return stack * (h // DOWNSAMPLE) * (w // DOWNSAMPLE)
