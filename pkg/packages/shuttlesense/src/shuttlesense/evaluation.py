"""Stroke detection and classification quality against a fixture's ground truth."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from shuttlesense.io import read_json
from shuttlesense.types import StrokeClass, StrokeFeatures


@dataclass
class EvalMetrics:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    class_accuracy: float = 0.0
    truth_count: int = 0
    detected_count: int = 0
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0
    confusion: dict[str, dict[str, int]] = field(default_factory=dict)  # truth -> predicted -> count


@dataclass
class TruthStroke:
    stroke_class: StrokeClass
    start_frame: int
    peak_frame: int
    end_frame: int


def load_truth(path: str | Path) -> list[TruthStroke]:
    """Read the stroke list of a fixture `truth.json` sidecar."""
    data = read_json(path)
    return [
        TruthStroke(
            stroke_class=StrokeClass(s["stroke_class"]),
            start_frame=int(s["start_frame"]),
            peak_frame=int(s["peak_frame"]),
            end_frame=int(s["end_frame"]),
        )
        for s in data["strokes"]
    ]


def evaluate_detections(
    detected: list[StrokeFeatures],
    truth: list[TruthStroke],
    peak_tolerance: int = 3,
) -> EvalMetrics:
    """Greedy one-to-one matching of detected and true peaks within `peak_tolerance` frames.

    Detections are taken in peak order; each claims the nearest unclaimed true
    stroke, earliest on ties.
    """
    metrics = EvalMetrics(truth_count=len(truth), detected_count=len(detected))
    confusion: dict[str, Counter[str]] = {}
    claimed: set[int] = set()
    correct = 0

    for feat in sorted(detected, key=lambda f: f.segment.peak_frame):
        peak = feat.segment.peak_frame
        best: int | None = None
        for j, t in enumerate(truth):
            if j in claimed or abs(t.peak_frame - peak) > peak_tolerance:
                continue
            if best is None or abs(t.peak_frame - peak) < abs(truth[best].peak_frame - peak):
                best = j
        if best is None:
            metrics.false_positives += 1
            continue
        claimed.add(best)
        metrics.true_positives += 1
        actual = truth[best].stroke_class
        confusion.setdefault(actual.value, Counter())[feat.stroke_class.value] += 1
        if feat.stroke_class == actual:
            correct += 1

    metrics.false_negatives = len(truth) - len(claimed)
    if metrics.true_positives + metrics.false_positives > 0:
        metrics.precision = metrics.true_positives / (metrics.true_positives + metrics.false_positives)
    if metrics.true_positives + metrics.false_negatives > 0:
        metrics.recall = metrics.true_positives / (metrics.true_positives + metrics.false_negatives)
    if metrics.precision + metrics.recall > 0:
        metrics.f1 = 2 * metrics.precision * metrics.recall / (metrics.precision + metrics.recall)
    if metrics.true_positives > 0:
        metrics.class_accuracy = correct / metrics.true_positives
    metrics.confusion = {k: dict(sorted(v.items())) for k, v in sorted(confusion.items())}
    return metrics


def metrics_to_dict(metrics: EvalMetrics) -> dict[str, Any]:
    return {
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
        "class_accuracy": metrics.class_accuracy,
        "truth_count": metrics.truth_count,
        "detected_count": metrics.detected_count,
        "true_positives": metrics.true_positives,
        "false_positives": metrics.false_positives,
        "false_negatives": metrics.false_negatives,
        "confusion": metrics.confusion,
    }
