"""Trace-replay detector: per-frame confidences from a recorded stream.

Traces live as CSV with header ``frame_seq,q_gun,q_knife`` plus a sidecar
JSON file holding labeled ground-truth intervals, so test inputs stay
hand-editable. Sequence gaps and exhausted traces replay as zero scores.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import List

from edgeguard.core.types import DetectionScores, Frame


@dataclass(frozen=True)
class GroundTruthInterval:
    start_seq: int
    end_seq: int
    label: str  # "robbery" or "normal"

    def __post_init__(self):
        if self.label not in ("robbery", "normal"):
            raise ValueError("label must be 'robbery' or 'normal'")
        if self.end_seq < self.start_seq:
            raise ValueError("interval end before start")

    def contains(self, seq: int) -> bool:
        return self.start_seq <= seq <= self.end_seq


class ScoreTrace:
    """Ordered (frame_seq, q_gun, q_knife) entries with ground truth."""

    def __init__(self, device_id: str, entries, ground_truth=()):
        self.device_id = device_id
        self.scores = {}
        last = None
        for seq, q_gun, q_knife in entries:
            if last is not None and seq <= last:
                raise ValueError("trace frame_seq must strictly increase")
            last = seq
            self.scores[seq] = (float(q_gun), float(q_knife))
        self.ground_truth: List[GroundTruthInterval] = list(ground_truth)
        ordered = sorted(self.ground_truth, key=lambda iv: iv.start_seq)
        for a, b in zip(ordered, ordered[1:]):
            if b.start_seq <= a.end_seq:
                raise ValueError("ground-truth intervals overlap")

    def lookup(self, seq: int) -> DetectionScores:
        q_gun, q_knife = self.scores.get(seq, (0.0, 0.0))
        return DetectionScores(frame_seq=seq, q_gun=q_gun, q_knife=q_knife)

    @classmethod
    def load(cls, csv_path, device_id: str = "") -> "ScoreTrace":
        """Read trace CSV and, when present, its ``.truth.json`` sidecar."""
        csv_path = Path(csv_path)
        entries = []
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["frame_seq", "q_gun", "q_knife"]:
                raise ValueError(
                    "bad trace header %r (want frame_seq,q_gun,q_knife)" % (reader.fieldnames,)
                )
            for row in reader:
                entries.append((int(row["frame_seq"]), float(row["q_gun"]), float(row["q_knife"])))
        truth_path = csv_path.with_suffix(".truth.json")
        ground_truth = []
        if truth_path.exists():
            with open(truth_path) as fh:
                data = json.load(fh)
            ground_truth = [
                GroundTruthInterval(iv["start_seq"], iv["end_seq"], iv["label"])
                for iv in data["intervals"]
            ]
        return cls(device_id or csv_path.stem, entries, ground_truth)

    def save(self, csv_path) -> None:
        csv_path = Path(csv_path)
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frame_seq", "q_gun", "q_knife"])
            for seq in sorted(self.scores):
                q_gun, q_knife = self.scores[seq]
                writer.writerow([seq, q_gun, q_knife])
        with open(csv_path.with_suffix(".truth.json"), "w") as fh:
            json.dump(
                {
                    "intervals": [
                        {"start_seq": iv.start_seq, "end_seq": iv.end_seq, "label": iv.label}
                        for iv in self.ground_truth
                    ]
                },
                fh,
                indent=2,
            )
            fh.write("\n")


class TraceDetector:
    """Pure lookup backend: same trace and seq always give same scores."""

    def __init__(self, trace: ScoreTrace):
        self.trace = trace

    def detect(self, frame: Frame) -> DetectionScores:
        return self.trace.lookup(frame.seq)
