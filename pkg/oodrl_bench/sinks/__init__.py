"""Sinks module

Export all available sinks
"""

from .abstract import ResultSink, SinkResult
from .local_sink import LocalSink, atomic_write
from .pgm import frame_to_pgm, pgm_to_frame

__all__ = [
    "ResultSink",
    "SinkResult",
    "LocalSink",
    "atomic_write",
    "frame_to_pgm",
    "pgm_to_frame",
]
