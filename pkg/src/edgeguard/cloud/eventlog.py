"""Append-only JSON-lines event log.

Every state change the service makes lands here with a monotone sequence
number; service state is a pure fold over these records, which is what
makes crash recovery a replay. Records are never rewritten.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional


class CorruptLog(Exception):
    pass


class EventLog:
    """In-memory record list with an optional line-per-record file sink."""

    def __init__(self, path=None):
        self.records: List[dict] = []
        self._next_seq = 0
        self._fh = None
        if path is not None:
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(path, "a", encoding="utf-8")

    def resume(self, records: List[dict]) -> None:
        """Seed the log with already-persisted records (rebuild path)."""
        if self.records:
            raise ValueError("can only resume an empty log")
        self.records = list(records)
        self._next_seq = len(records)

    def append(self, t: int, kind: str, data: dict) -> dict:
        record = {"seq": self._next_seq, "t": t, "kind": kind, "data": data}
        self._next_seq += 1
        self.records.append(record)
        if self._fh is not None:
            self._fh.write(json.dumps(record, sort_keys=True) + "\n")
            self._fh.flush()
        return record

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def dump(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            for record in self.records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_log(source) -> List[dict]:
    """Load and validate records (path or iterable of dicts).

    Raises CorruptLog on a parse failure or a sequence gap; a service must
    refuse to start from such a log.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
        records = []
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorruptLog("line %d is not valid JSON: %s" % (i + 1, exc)) from exc
    else:
        records = list(source)
    for i, record in enumerate(records):
        if not isinstance(record, dict) or "seq" not in record or "kind" not in record:
            raise CorruptLog("record %d missing required fields" % i)
        if record["seq"] != i:
            raise CorruptLog("sequence gap at record %d (seq %r)" % (i, record["seq"]))
    return records
