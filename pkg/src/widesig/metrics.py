"""IoU matching and precision/recall/F1 scoring.

Matching is greedy in descending IoU (ties broken by detection score, then
index), the standard object-detection convention: deterministic, one-to-one,
and maximal in the sense that no unmatched detection/truth pair is left with
IoU at or above the threshold.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .detect import Detection
from .errors import ParameterError
from .grid import TimeFreqBox

DEFAULT_IOU_THRESHOLD = 0.5
# COCO-style sweep, 0.5 to 0.95 in 0.05 steps (10 values).
DEFAULT_SWEEP_THRESHOLDS = tuple(np.round(np.arange(0.5, 0.951, 0.05), 2))


def iou(a: TimeFreqBox, b: TimeFreqBox) -> float:
    """Intersection over union in (samples x normalized frequency) area."""
    if a.area <= 0 or b.area <= 0:
        raise ParameterError("boxes must have positive area")
    t_overlap = min(a.t_end, b.t_end) - max(a.t_start, b.t_start)
    f_overlap = min(a.f_high, b.f_high) - max(a.f_low, b.f_low)
    if t_overlap <= 0 or f_overlap <= 0:
        return 0.0
    inter = t_overlap * f_overlap
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[int, int, float], ...]  # (detection idx, truth idx, IoU)
    unmatched_detections: tuple[int, ...]
    unmatched_truths: tuple[int, ...]
    iou_threshold: float


def match(
    dets: list[Detection],
    truths: list[tuple[TimeFreqBox, str]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    class_aware: bool = False,
) -> MatchResult:
    if not 0.0 < iou_threshold <= 1.0:
        raise ParameterError("iou_threshold must be in (0, 1]")
    candidates = []
    for di, det in enumerate(dets):
        for ti, (tbox, tlabel) in enumerate(truths):
            if class_aware and det.label != tlabel:
                continue
            overlap = iou(det.box, tbox)
            if overlap >= iou_threshold:
                candidates.append((overlap, det.score, di, ti))
    candidates.sort(key=lambda c: (-c[0], -c[1], c[2], c[3]))

    used_d: set[int] = set()
    used_t: set[int] = set()
    pairs = []
    for overlap, _, di, ti in candidates:
        if di in used_d or ti in used_t:
            continue
        used_d.add(di)
        used_t.add(ti)
        pairs.append((di, ti, overlap))
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_detections=tuple(i for i in range(len(dets)) if i not in used_d),
        unmatched_truths=tuple(i for i in range(len(truths)) if i not in used_t),
        iou_threshold=iou_threshold,
    )


def _ratios(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


@dataclass(frozen=True)
class ThresholdScore:
    iou_threshold: float
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, iou_threshold: float, tp: int, fp: int, fn: int) -> "ThresholdScore":
        p, r, f1 = _ratios(tp, fp, fn)
        return cls(iou_threshold=iou_threshold, tp=tp, fp=fp, fn=fn, precision=p, recall=r, f1=f1)


@dataclass(frozen=True)
class ScoreReport:
    """Counts and ratios per IoU threshold, with the first threshold (the
    primary one, 0.5 by default) exposed as the headline numbers."""

    per_threshold: tuple[ThresholdScore, ...]
    class_aware: bool = False
    per_snr: dict | None = None

    @property
    def headline(self) -> ThresholdScore:
        return self.per_threshold[0]

    tp = property(lambda self: self.headline.tp)
    fp = property(lambda self: self.headline.fp)
    fn = property(lambda self: self.headline.fn)
    precision = property(lambda self: self.headline.precision)
    recall = property(lambda self: self.headline.recall)
    f1 = property(lambda self: self.headline.f1)

    def mean_over_thresholds(self) -> tuple[float, float, float]:
        ps = [t.precision for t in self.per_threshold]
        rs = [t.recall for t in self.per_threshold]
        fs = [t.f1 for t in self.per_threshold]
        return float(np.mean(ps)), float(np.mean(rs)), float(np.mean(fs))

    def to_dict(self) -> dict:
        mp, mr, mf = self.mean_over_thresholds()
        out = {
            "class_aware": self.class_aware,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_precision": mp,
            "mean_recall": mr,
            "mean_f1": mf,
            "per_threshold": [vars(t) for t in self.per_threshold],
        }
        if self.per_snr is not None:
            out["per_snr"] = {
                str(snr): [vars(t) for t in rows] for snr, rows in self.per_snr.items()
            }
        return out

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def to_csv(self, path) -> None:
        """Flat rows, one per (snr, iou_threshold); snr empty when absent."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["snr_db", "iou_threshold", "precision", "recall", "f1", "tp", "fp", "fn"])
            if self.per_snr is not None:
                for snr in sorted(self.per_snr):
                    for t in self.per_snr[snr]:
                        writer.writerow([snr, t.iou_threshold, t.precision, t.recall, t.f1, t.tp, t.fp, t.fn])
            else:
                for t in self.per_threshold:
                    writer.writerow(["", t.iou_threshold, t.precision, t.recall, t.f1, t.tp, t.fp, t.fn])


def score(result: MatchResult, n_detections: int, n_truths: int, class_aware: bool = False) -> ScoreReport:
    tp = len(result.pairs)
    row = ThresholdScore.from_counts(result.iou_threshold, tp, n_detections - tp, n_truths - tp)
    return ScoreReport(per_threshold=(row,), class_aware=class_aware)


def sweep_score(
    dets: list[Detection],
    truths: list[tuple[TimeFreqBox, str]],
    thresholds: tuple[float, ...] = DEFAULT_SWEEP_THRESHOLDS,
    class_aware: bool = False,
) -> ScoreReport:
    rows = []
    for thr in thresholds:
        result = match(dets, truths, thr, class_aware)
        tp = len(result.pairs)
        rows.append(ThresholdScore.from_counts(thr, tp, len(dets) - tp, len(truths) - tp))
    return ScoreReport(per_threshold=tuple(rows), class_aware=class_aware)
