"""Alert-level evaluation metrics.

Confusion counts treat whole alerts/intervals as units: a confirmed alert
whose trigger frame lies inside a labeled robbery interval is a true
positive, a confirmed alert outside every robbery interval a false
positive; robbery intervals that never produce a confirmed alert count as
false negatives and quiet normal intervals as true negatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional


class DegenerateLabels(Exception):
    pass


def compute_auc(scores, labels) -> float:
    """Area under the ROC curve by trapezoidal sweep.

    Thresholds sweep the sorted unique scores (plus the implicit
    all-negative start), with tied scores handled as one group, which
    makes the result equal to the Mann-Whitney statistic
    P(score_pos > score_neg) + 0.5 * P(tie).
    """
    scores = list(scores)
    labels = list(labels)
    if len(scores) != len(labels):
        raise ValueError("scores and labels differ in length")
    pos = sum(1 for y in labels if y == 1)
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        raise DegenerateLabels("need at least one positive and one negative label")

    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    auc = 0.0
    tp = fp = 0
    prev_tp = prev_fp = 0
    i = 0
    while i < len(order):
        j = i
        threshold = scores[order[i]]
        while j < len(order) and scores[order[j]] == threshold:
            if labels[order[j]] == 1:
                tp += 1
            else:
                fp += 1
            j += 1
        auc += (fp - prev_fp) / neg * (tp + prev_tp) / pos / 2.0
        prev_tp, prev_fp = tp, fp
        i = j
    return auc


def auc_pairwise(scores, labels) -> float:
    """Brute-force oracle: concordant pairs plus half the ties."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y != 1]
    if not pos or not neg:
        raise DegenerateLabels("need both classes")
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def compute_metrics(tp: int, fp: int, fn: int, tn: int) -> dict:
    """Accuracy/precision/recall/F1 with zero denominators flagged."""
    total = tp + fp + fn + tn
    if total <= 0:
        raise ValueError("empty confusion matrix")
    flags = []
    accuracy = (tp + tn) / total
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        flags.append("precision_zero_denominator")
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        flags.append("recall_zero_denominator")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        flags.append("f1_zero_denominator")
    return {
        "accuracy": accuracy,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "flags": flags,
    }


@dataclass
class MetricsReport:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    auc: Optional[float] = None
    latencies_ms: List[int] = field(default_factory=list)
    alerts: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        derived = compute_metrics(self.tp, self.fp, self.fn, self.tn) if (
            self.tp + self.fp + self.fn + self.tn
        ) else {"accuracy": None, "precision": None, "recall": None, "f1": None, "flags": ["empty"]}
        return {
            "counts": {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn},
            "metrics": derived,
            "auc": self.auc,
            "latencies_ms": self.latencies_ms,
            "alerts": self.alerts,
        }

    def table(self) -> str:
        j = self.to_json()
        m = j["metrics"]
        lines = [
            "counts     TP=%d FP=%d FN=%d TN=%d" % (self.tp, self.fp, self.fn, self.tn),
            "accuracy   %s" % _fmt(m["accuracy"]),
            "precision  %s" % _fmt(m["precision"]),
            "recall     %s" % _fmt(m["recall"]),
            "f1         %s" % _fmt(m["f1"]),
            "auc        %s" % _fmt(self.auc),
        ]
        if self.latencies_ms:
            lines.append(
                "latency_ms min=%d median=%d max=%d"
                % (
                    min(self.latencies_ms),
                    sorted(self.latencies_ms)[len(self.latencies_ms) // 2],
                    max(self.latencies_ms),
                )
            )
        if m["flags"]:
            lines.append("flags      %s" % ",".join(m["flags"]))
        return "\n".join(lines)


def _fmt(value) -> str:
    return "n/a" if value is None else "%.4f" % value
