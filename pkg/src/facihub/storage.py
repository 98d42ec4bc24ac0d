"""Append-only NDJSON logs backing engine state (optional: in-memory when
no path is given). The whole engine state is a directory of these files."""

from __future__ import annotations

import json
from pathlib import Path

from filelock import FileLock


class NdjsonLog:
    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._lock = FileLock(str(self._path) + ".lock") if self._path else None

    def load(self) -> list[dict]:
        if self._path is None or not self._path.exists():
            return []
        out = []
        with self._path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(json.loads(line))
        return out

    def append(self, obj: dict) -> None:
        if self._path is None:
            return
        line = json.dumps(obj, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
