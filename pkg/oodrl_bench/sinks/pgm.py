"""Portable graymap (binary P5, maxval 255) encoding"""

import numpy as np

from ..errors import DataError, ShapeError


def frame_to_pgm(frame: np.ndarray) -> bytes:
    """Encode a 2-D frame with values in [0, 1] as P5 bytes

    Values are clipped to [0, 1] and rounded to the nearest of 256 levels.
    """
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeError(f"Expected a non-empty 2-D frame, got shape {arr.shape}")
    h, w = arr.shape
    pixels = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes()


def _read_header(data: bytes) -> tuple[list[int], int]:
    """Parse width, height, maxval; return them and the payload offset"""
    values: list[int] = []
    pos = 2
    while len(values) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise DataError("Truncated PGM header")
            pos = end + 1
            continue
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise DataError("Malformed PGM header")
        values.append(int(data[start:pos]))
    # exactly one whitespace byte separates the header from the raster
    return values, pos + 1


def pgm_to_frame(data: bytes) -> np.ndarray:
    """Decode P5 bytes into a float frame in [0, 1]

    Raises:
        DataError: If the data is not an 8-bit binary PGM
    """
    if not data.startswith(b"P5"):
        raise DataError("Not a binary PGM (missing P5 magic)")
    (w, h, maxval), offset = _read_header(data)
    if maxval != 255 or w < 1 or h < 1:
        raise DataError(f"Unsupported PGM: {w}x{h}, maxval {maxval}")
    body = data[offset : offset + w * h]
    if len(body) != w * h:
        raise DataError(f"PGM payload truncated: expected {w * h} bytes, got {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w).astype(np.float64) / 255.0
