"""
Sinks abstraction

A sink stores experiment outputs:
- LocalSink: atomic CSV / JSON / PGM files under an output directory
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, TypedDict

import numpy as np


class SinkResult(TypedDict):
    """Result of one write

    Attributes:
        path: File that was written
        rows: Number of rows (CSV) or top-level entries (JSON); 1 for frames
        bytes: Size of the written file
    """

    path: str
    rows: int
    bytes: int


class ResultSink(ABC):
    """Abstract result sink

    Every sink implements write_csv(), write_json(), write_frame() and close().

    Example:
        >>> with LocalSink("runs/demo") as sink:
        ...     sink.write_csv("detect/results.csv", rows, columns=["trial", "auc"])
        ...     sink.write_json("detect/aggregate.json", {"mean_auc": 0.7})
    """

    @abstractmethod
    def write_csv(
        self, name: str, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]
    ) -> SinkResult:
        """Write rows as CSV with a fixed column order

        Args:
            name: Path relative to the sink root
            rows: Mappings holding at least ``columns``
            columns: Header, in order
        """

    @abstractmethod
    def write_json(self, name: str, data: Any) -> SinkResult:
        """Write a JSON document with sorted keys"""

    @abstractmethod
    def write_frame(self, name: str, frame: np.ndarray) -> SinkResult:
        """Write a grayscale frame in [0, 1] as binary PGM"""

    @abstractmethod
    def path(self, name: str) -> Path:
        """Location of ``name`` inside the sink"""

    @abstractmethod
    def close(self):
        """Release resources"""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
        return False
