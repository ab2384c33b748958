"""
Local Sink - File Storage

Stores experiment outputs under one directory. Every file is written to a
temporary sibling first and renamed into place, so readers never see a
partial file.
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .abstract import ResultSink, SinkResult
from .pgm import frame_to_pgm

logger = logging.getLogger(__name__)


def atomic_write(path: str | Path, data: bytes) -> Path:
    """Write bytes to ``path`` via a temp file and ``os.replace``"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def _csv_value(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True)
    return value


class LocalSink(ResultSink):
    """Local file sink

    Output is deterministic: CSV floats use ``repr`` and JSON keys are sorted,
    so identical results give identical bytes.

    Example:
        >>> sink = LocalSink(output_dir="runs/demo")
        >>> sink.write_json("effective_config.json", config.model_dump(mode="json"))
        >>> sink.write_csv("detect/results.csv", rows, columns=RESULT_COLUMNS)
        >>> sink.close()
    """

    def __init__(self, output_dir: str | Path = "runs"):
        """Initialize LocalSink

        Args:
            output_dir: Root directory; created if missing
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.files_written = 0

        logger.info(f"LocalSink initialized: dir={self.output_dir}")

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def _write(self, name: str, data: bytes, rows: int) -> SinkResult:
        target = atomic_write(self.path(name), data)
        self.files_written += 1
        logger.debug(f"Wrote {target} ({len(data)} bytes)")
        return {"path": str(target), "rows": rows, "bytes": len(data)}

    def write_csv(
        self, name: str, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]
    ) -> SinkResult:
        buffer = io.StringIO()
        writer = csv.DictWriter(
            buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n"
        )
        writer.writeheader()
        count = 0
        for row in rows:
            writer.writerow({key: _csv_value(row.get(key, "")) for key in columns})
            count += 1
        return self._write(name, buffer.getvalue().encode("utf-8"), count)

    def write_json(self, name: str, data: Any) -> SinkResult:
        text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
        rows = len(data) if isinstance(data, (list, dict)) else 1
        return self._write(name, text.encode("utf-8"), rows)

    def write_frame(self, name: str, frame: np.ndarray) -> SinkResult:
        return self._write(name, frame_to_pgm(frame), 1)

    def close(self):
        """No resources to close for file-based sink"""
        logger.info(f"LocalSink closed ({self.files_written} files written)")
