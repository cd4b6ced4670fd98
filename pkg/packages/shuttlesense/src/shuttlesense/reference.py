"""Reference envelopes and stroke scoring against them."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from shuttlesense.errors import BadParameter, EmptyReference, MalformedFile, UnknownClass, UsageError
from shuttlesense.io import read_json, write_json
from shuttlesense.types import (
    PHASE_SAMPLES,
    AngleDeviation,
    EnvelopeBand,
    EnvelopeModel,
    Fault,
    PlayAccuracy,
    StrokeClass,
    StrokeFeatures,
    StrokeScore,
)

log = structlog.get_logger()

ENVELOPE_VERSION = "1"
DEFAULT_D_NORM = 6.0
SPAN_FRACTION = 0.5


def build_envelope(
    strokes: list[StrokeFeatures],
    p_lo: float = 10.0,
    p_hi: float = 90.0,
    n_min: int = 5,
) -> EnvelopeModel:
    """Per-phase percentile band for every (class, angle) pair with enough support.

    Pairs with fewer than `n_min` usable series are left out and listed in
    `excluded` together with their count.
    """
    if not 0 <= p_lo < p_hi <= 100:
        raise BadParameter(f"percentiles need 0 <= p_lo < p_hi <= 100, got ({p_lo}, {p_hi})")

    gathered: dict[tuple[StrokeClass, str], list[np.ndarray]] = defaultdict(list)
    seen: set[tuple[StrokeClass, str]] = set()
    for features in strokes:
        for angle, series in features.angle_phase.items():
            key = (features.stroke_class, angle)
            seen.add(key)
            if series is not None:
                gathered[key].append(series)

    model = EnvelopeModel(p_lo=p_lo, p_hi=p_hi, n_min=n_min)
    for key in sorted(seen):
        stack = gathered.get(key, [])
        if len(stack) < n_min:
            model.excluded.append((key[0], key[1], len(stack)))
            continue
        values = np.stack(stack)
        model.bands[key] = EnvelopeBand(
            lo=np.percentile(values, p_lo, axis=0, method="linear"),
            hi=np.percentile(values, p_hi, axis=0, method="linear"),
            support_count=len(stack),
        )

    if not model.bands:
        raise EmptyReference(f"no (class, angle) pair reaches {n_min} reference strokes")
    log.info(
        "envelope_built",
        strokes=len(strokes),
        pairs=len(model.bands),
        excluded=len(model.excluded),
        classes=sorted(str(c) for c in model.classes()),
    )
    return model


def apply_hard_limits(model: EnvelopeModel, hard_limits: dict[str, list[float]]) -> EnvelopeModel:
    """Copy of `model` where each named angle's band is a constant [min, max] for every class."""
    if not hard_limits:
        return model
    bands = dict(model.bands)
    for (stroke_class, angle), band in model.bands.items():
        if angle in hard_limits:
            lo, hi = hard_limits[angle]
            bands[(stroke_class, angle)] = EnvelopeBand(
                lo=np.full(PHASE_SAMPLES, float(lo)),
                hi=np.full(PHASE_SAMPLES, float(hi)),
                support_count=band.support_count,
            )
    return EnvelopeModel(
        p_lo=model.p_lo, p_hi=model.p_hi, n_min=model.n_min, bands=bands, excluded=list(model.excluded)
    )


def worst_phase_span(dev: np.ndarray, fraction: float = SPAN_FRACTION) -> tuple[float, float] | None:
    """Strongest deviation run, as phase fractions.

    Only phases reaching `fraction` of the peak deviation count; among the
    contiguous runs of those, the one with the largest integral wins.
    """
    if not 0 < fraction <= 1:
        raise BadParameter(f"span fraction must be in (0, 1], got {fraction}")
    peak = float(dev.max()) if len(dev) else 0.0
    if peak <= 0:
        return None
    strong = (dev > 0) & (dev >= fraction * peak)
    padded = np.concatenate([[False], strong, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    best: tuple[int, int] | None = None
    best_total = -1.0
    for start, end in zip(edges[0::2], edges[1::2]):
        total = float(dev[start:end].sum())
        if total > best_total:
            best, best_total = (int(start), int(end) - 1), total
    last = len(dev) - 1
    return best[0] / last, best[1] / last


def _deviation(angle: str, values: np.ndarray, band: EnvelopeBand) -> AngleDeviation:
    below = np.maximum(0.0, band.lo - values)
    above = np.maximum(0.0, values - band.hi)
    dev = below + above
    return AngleDeviation(
        angle_name=angle,
        dev=dev,
        above=above,
        below=below,
        mean_dev=float(dev.mean()),
        max_dev=float(dev.max()),
        worst_phase_span=worst_phase_span(dev),
    )


def score_stroke(features: StrokeFeatures, model: EnvelopeModel, d_norm: float = DEFAULT_D_NORM) -> StrokeScore:
    """Deviation outside the band per angle, and accuracy on a 0-100 scale.

    Angles missing in the stroke or absent from the model are skipped and
    listed; a stroke with nothing scorable gets accuracy None.
    """
    if d_norm <= 0:
        raise BadParameter(f"d_norm must be > 0, got {d_norm}")
    if features.stroke_class not in model.classes():
        raise UnknownClass(features.stroke_class)

    deviations: dict[str, AngleDeviation] = {}
    skipped: list[str] = []
    for angle, values in features.angle_phase.items():
        band = model.bands.get((features.stroke_class, angle))
        if values is None or band is None:
            skipped.append(angle)
            continue
        deviations[angle] = _deviation(angle, values, band)

    if not deviations:
        return StrokeScore(features, deviations, mean_dev=0.0, accuracy=None, skipped_angles=skipped)
    # every profile has PHASE_SAMPLES points, so the mean of means is the pooled mean
    mean_dev = float(np.mean([d.mean_dev for d in deviations.values()]))
    accuracy = 100.0 * max(0.0, 1.0 - mean_dev / d_norm)
    return StrokeScore(features, deviations, mean_dev=mean_dev, accuracy=accuracy, skipped_angles=skipped)


def rank_faults(scores: list[StrokeScore]) -> list[Fault]:
    """Aggregate deviations per (angle, class), most severe first.

    Severity is the mean of the per-stroke mean deviation. Pairs with zero
    severity are not faults. Ties fall back to (class, angle) order.
    """
    grouped: dict[tuple[StrokeClass, str], list[AngleDeviation]] = defaultdict(list)
    for score in scores:
        for angle, deviation in score.deviations.items():
            grouped[(score.features.stroke_class, angle)].append(deviation)

    faults: list[Fault] = []
    for (stroke_class, angle), devs in grouped.items():
        severity = float(np.mean([d.mean_dev for d in devs]))
        if severity <= 0:
            continue
        profile = np.mean(np.stack([d.dev for d in devs]), axis=0)
        above = sum(float(d.above.sum()) for d in devs)
        below = sum(float(d.below.sum()) for d in devs)
        faults.append(
            Fault(
                angle_name=angle,
                stroke_class=stroke_class,
                severity=severity,
                worst_phase_span=worst_phase_span(profile),
                direction="above" if above >= below else "below",
                stroke_count=len(devs),
                max_dev=max(d.max_dev for d in devs),
            )
        )
    faults.sort(key=lambda f: (-f.severity, str(f.stroke_class), f.angle_name))
    return faults


def summarize_accuracy(scores: list[StrokeScore]) -> PlayAccuracy:
    """Equal-weight session and per-class means over scored strokes."""
    scored = [s for s in scores if s.accuracy is not None]
    per_class: dict[StrokeClass, list[float]] = defaultdict(list)
    for s in scored:
        per_class[s.features.stroke_class].append(s.accuracy)
    return PlayAccuracy(
        stroke_accuracies=[s.accuracy for s in scored],
        session_accuracy=float(np.mean([s.accuracy for s in scored])) if scored else None,
        per_class={cls: float(np.mean(v)) for cls, v in sorted(per_class.items())},
    )


# --- persistence ---


def envelope_to_dict(model: EnvelopeModel) -> dict[str, Any]:
    return {
        "version": ENVELOPE_VERSION,
        "p_lo": model.p_lo,
        "p_hi": model.p_hi,
        "n_min": model.n_min,
        "bands": [
            {
                "stroke_class": str(cls),
                "angle": angle,
                "support_count": band.support_count,
                "lo": band.lo.tolist(),
                "hi": band.hi.tolist(),
            }
            for (cls, angle), band in sorted(model.bands.items())
        ],
        "excluded": [
            {"stroke_class": str(cls), "angle": angle, "count": count}
            for cls, angle, count in model.excluded
        ],
    }


def envelope_from_dict(data: dict[str, Any], source: str | Path = "<envelope>") -> EnvelopeModel:
    if data.get("version") != ENVELOPE_VERSION:
        raise MalformedFile(source, f"unsupported envelope version {data.get('version')!r}")
    try:
        model = EnvelopeModel(p_lo=float(data["p_lo"]), p_hi=float(data["p_hi"]), n_min=int(data["n_min"]))
        for entry in data["bands"]:
            lo = np.asarray(entry["lo"], dtype=float)
            hi = np.asarray(entry["hi"], dtype=float)
            if lo.shape != (PHASE_SAMPLES,) or hi.shape != (PHASE_SAMPLES,) or np.any(lo > hi):
                raise MalformedFile(source, f"band {entry['stroke_class']}/{entry['angle']} is not a valid band")
            key = (StrokeClass(entry["stroke_class"]), str(entry["angle"]))
            model.bands[key] = EnvelopeBand(lo=lo, hi=hi, support_count=int(entry["support_count"]))
        for entry in data.get("excluded", []):
            model.excluded.append((StrokeClass(entry["stroke_class"]), str(entry["angle"]), int(entry["count"])))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedFile(source, f"invalid envelope: {e}") from e
    return model


def save_envelope(model: EnvelopeModel, path: str | Path) -> None:
    write_json(envelope_to_dict(model), path)
    log.info("envelope_saved", path=str(path), pairs=len(model.bands))


def load_envelope(path: str | Path) -> EnvelopeModel:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"envelope file not found: {path}")
    return envelope_from_dict(read_json(path), path)
