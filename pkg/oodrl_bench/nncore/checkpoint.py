"""Versioned binary checkpoint format

Layout::

    b"ORLB"                      magic
    uint32 LE                    format version (1)
    uint32 LE                    header length in bytes
    UTF-8 JSON header            {"spec": ..., "seed": ..., "metadata": ...}
    float32 LE payload           W_0, b_0, W_1, b_1, ... row-major

The header is serialized with sorted keys so identical networks produce
identical bytes.
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import CheckpointError
from ..sinks import atomic_write
from .network import Network, NetworkSpec

logger = logging.getLogger(__name__)

MAGIC = b"ORLB"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sII")


@dataclass
class Checkpoint:
    """A network plus the metadata needed to rebuild and audit it"""

    network: Network
    seed: int
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def spec(self) -> NetworkSpec:
        return self.network.spec


def checkpoint_to_bytes(checkpoint: Checkpoint) -> bytes:
    header = {
        "spec": checkpoint.spec.to_dict(),
        "seed": int(checkpoint.seed),
        "metadata": checkpoint.metadata,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(
        np.ascontiguousarray(p, dtype="<f4").tobytes() for p in checkpoint.network.parameters()
    )
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header_bytes)) + header_bytes + payload


def checkpoint_from_bytes(data: bytes) -> Checkpoint:
    if len(data) < _PREFIX.size:
        raise CheckpointError("Checkpoint truncated before header")
    magic, version, header_len = _PREFIX.unpack_from(data, 0)
    if magic != MAGIC:
        raise CheckpointError(f"Bad checkpoint magic: {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint version: {version}")

    start = _PREFIX.size
    try:
        header = json.loads(data[start : start + header_len].decode("utf-8"))
        spec = NetworkSpec.from_dict(header["spec"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, ValueError) as e:
        raise CheckpointError(f"Corrupt checkpoint header: {e}") from e

    offset = start + header_len
    weights, biases = [], []
    dims = spec.layer_dims
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        for shape, target in (((fan_out, fan_in), weights), ((fan_out,), biases)):
            count = int(np.prod(shape))
            end = offset + 4 * count
            if end > len(data):
                raise CheckpointError("Checkpoint payload truncated")
            array = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
            target.append(array.reshape(shape))
            offset = end
    if offset != len(data):
        raise CheckpointError(f"{len(data) - offset} trailing bytes in checkpoint")

    network = Network(spec=spec, weights=weights, biases=biases)
    return Checkpoint(
        network=network, seed=int(header.get("seed", 0)), metadata=header.get("metadata", {})
    )


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> Path:
    """Write a checkpoint atomically (temp file in the same directory, then rename)"""
    data = checkpoint_to_bytes(checkpoint)
    path = atomic_write(path, data)
    logger.debug(f"Saved checkpoint {path} ({len(data)} bytes)")
    return path


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Read a checkpoint

    Raises:
        CheckpointError: If the file is missing or malformed
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"Checkpoint not found: {path}")
    return checkpoint_from_bytes(path.read_bytes())
