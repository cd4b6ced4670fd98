"""Assessment reports, their canonical JSON form, and progress across sessions."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from shuttlesense.config import AnalysisConfig
from shuttlesense.errors import BadParameter, MalformedFile
from shuttlesense.io import dumps_canonical, read_json
from shuttlesense.reference import rank_faults, summarize_accuracy
from shuttlesense.types import (
    AssessmentReport,
    Fault,
    HeatmapRef,
    ProgressEntry,
    ProgressSummary,
    ProgressTrack,
    StrokeClass,
    StrokeRow,
    StrokeScore,
    SwingMetrics,
    SwingSummary,
)

log = structlog.get_logger()

REPORT_VERSION = "1"


def stroke_label(view_id: str, start_frame: int, end_frame: int) -> str:
    return f"{view_id}:{start_frame}-{end_frame}"


def summarize_swings(swings: list[tuple[StrokeClass, SwingMetrics]]) -> list[SwingSummary]:
    grouped: dict[StrokeClass, list[SwingMetrics]] = defaultdict(list)
    for stroke_class, metrics in swings:
        grouped[stroke_class].append(metrics)
    return [
        SwingSummary(
            stroke_class=cls,
            count=len(items),
            mean_head_speed=float(np.mean([m.head_speed for m in items])),
            mean_force=float(np.mean([m.force for m in items])),
            mean_radian=float(np.mean([m.radian for m in items])),
            total_calories=float(np.sum([m.calories for m in items])),
        )
        for cls, items in sorted(grouped.items())
    ]


def assemble_report(
    session_id: str,
    subject_id: str,
    scores: list[StrokeScore],
    config: AnalysisConfig | None = None,
    swings: list[tuple[StrokeClass, SwingMetrics]] | None = None,
    heatmaps: list[HeatmapRef] | None = None,
    validation_warnings: list[str] | None = None,
    unscored: list[str] | None = None,
    recorded_at: str | None = None,
) -> AssessmentReport:
    """Combine scored strokes and side products into one deterministic report.

    Strokes without any scorable angle join `unscored` next to whatever the
    caller already excluded.
    """
    config = config or AnalysisConfig()
    accuracy = summarize_accuracy(scores)
    rows = sorted(
        (
            StrokeRow(
                view_id=s.features.segment.view_id,
                start_frame=s.features.segment.start_frame,
                peak_frame=s.features.segment.peak_frame,
                end_frame=s.features.segment.end_frame,
                stroke_class=s.features.stroke_class,
                accuracy=s.accuracy,
                mean_dev=s.mean_dev,
            )
            for s in scores
        ),
        key=lambda r: (r.view_id, r.start_frame),
    )
    excluded = list(unscored or [])
    excluded += [stroke_label(r.view_id, r.start_frame, r.end_frame) for r in rows if r.accuracy is None]

    report = AssessmentReport(
        session_id=session_id,
        subject_id=subject_id,
        overall_accuracy=accuracy.session_accuracy,
        per_class_accuracy=accuracy.per_class,
        faults=rank_faults(scores),
        top_k=config.report.top_k,
        strokes=rows,
        swing=summarize_swings(swings or []),
        heatmaps=sorted(heatmaps or [], key=lambda h: (h.origin_zone, str(h.stroke_class))),
        validation_warnings=list(validation_warnings or []),
        unscored=sorted(excluded),
        recorded_at=recorded_at,
        config=config.to_dict(),
    )
    log.info(
        "report_assembled",
        session_id=session_id,
        strokes=len(rows),
        faults=len(report.faults),
        accuracy=report.overall_accuracy,
    )
    return report


# --- canonical form ---


def _fault_to_dict(f: Fault) -> dict[str, Any]:
    return {
        "angle": f.angle_name,
        "stroke_class": f.stroke_class.value,
        "severity": f.severity,
        "max_dev": f.max_dev,
        "phase_span": list(f.worst_phase_span) if f.worst_phase_span else None,
        "direction": f.direction,
        "stroke_count": f.stroke_count,
    }


def report_to_dict(report: AssessmentReport) -> dict[str, Any]:
    return {
        "version": REPORT_VERSION,
        "session_id": report.session_id,
        "subject_id": report.subject_id,
        "recorded_at": report.recorded_at,
        "overall_accuracy": report.overall_accuracy,
        "per_class_accuracy": {cls.value: acc for cls, acc in report.per_class_accuracy.items()},
        "top_k": report.top_k,
        "faults": [_fault_to_dict(f) for f in report.faults],
        "strokes": [
            {
                "view_id": r.view_id,
                "start_frame": r.start_frame,
                "peak_frame": r.peak_frame,
                "end_frame": r.end_frame,
                "stroke_class": r.stroke_class.value,
                "accuracy": r.accuracy,
                "mean_dev": r.mean_dev,
            }
            for r in report.strokes
        ],
        "swing": [
            {
                "stroke_class": s.stroke_class.value,
                "count": s.count,
                "mean_head_speed": s.mean_head_speed,
                "mean_force": s.mean_force,
                "mean_radian": s.mean_radian,
                "total_calories": s.total_calories,
            }
            for s in report.swing
        ],
        "heatmaps": [
            {
                "origin_zone": h.origin_zone,
                "stroke_class": h.stroke_class.value,
                "path": h.path,
                "most_probable_zone": h.most_probable_zone,
                "count": h.count,
            }
            for h in report.heatmaps
        ],
        "validation_warnings": report.validation_warnings,
        "unscored": report.unscored,
        "config": report.config,
    }


def serialize_report(report: AssessmentReport) -> str:
    return dumps_canonical(report_to_dict(report))


def report_from_dict(data: dict[str, Any], source: str | Path = "<report>") -> AssessmentReport:
    if data.get("version") != REPORT_VERSION:
        raise MalformedFile(source, f"unsupported report version {data.get('version')!r}")
    try:
        return AssessmentReport(
            session_id=str(data["session_id"]),
            subject_id=str(data["subject_id"]),
            overall_accuracy=data["overall_accuracy"],
            per_class_accuracy={StrokeClass(k): float(v) for k, v in data["per_class_accuracy"].items()},
            faults=[
                Fault(
                    angle_name=f["angle"],
                    stroke_class=StrokeClass(f["stroke_class"]),
                    severity=float(f["severity"]),
                    worst_phase_span=tuple(f["phase_span"]) if f["phase_span"] is not None else None,
                    direction=f["direction"],
                    stroke_count=int(f["stroke_count"]),
                    max_dev=float(f["max_dev"]),
                )
                for f in data["faults"]
            ],
            top_k=int(data["top_k"]),
            strokes=[
                StrokeRow(
                    view_id=r["view_id"],
                    start_frame=int(r["start_frame"]),
                    peak_frame=int(r["peak_frame"]),
                    end_frame=int(r["end_frame"]),
                    stroke_class=StrokeClass(r["stroke_class"]),
                    accuracy=r["accuracy"],
                    mean_dev=float(r["mean_dev"]),
                )
                for r in data["strokes"]
            ],
            swing=[
                SwingSummary(
                    stroke_class=StrokeClass(s["stroke_class"]),
                    count=int(s["count"]),
                    mean_head_speed=float(s["mean_head_speed"]),
                    mean_force=float(s["mean_force"]),
                    mean_radian=float(s["mean_radian"]),
                    total_calories=float(s["total_calories"]),
                )
                for s in data["swing"]
            ],
            heatmaps=[
                HeatmapRef(
                    origin_zone=int(h["origin_zone"]),
                    stroke_class=StrokeClass(h["stroke_class"]),
                    path=str(h["path"]),
                    most_probable_zone=int(h["most_probable_zone"]),
                    count=int(h["count"]),
                )
                for h in data["heatmaps"]
            ],
            validation_warnings=list(data["validation_warnings"]),
            unscored=list(data["unscored"]),
            recorded_at=data.get("recorded_at"),
            config=dict(data["config"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedFile(source, f"invalid report: {e}") from e


def load_report(path: str | Path) -> AssessmentReport:
    data = read_json(path)
    if not isinstance(data, dict):
        raise MalformedFile(path, "report must hold a JSON object")
    return report_from_dict(data, path)


# --- progress ---


def progress_track(reports: list[AssessmentReport]) -> ProgressTrack:
    """Entries ordered by `recorded_at` when every report has one, else as given."""
    ordered = list(reports)
    if ordered and all(r.recorded_at for r in ordered):
        ordered.sort(key=lambda r: r.recorded_at)
    return ProgressTrack(
        entries=[
            ProgressEntry(
                session_id=r.session_id,
                timestamp=r.recorded_at or "",
                overall_accuracy=r.overall_accuracy,
                per_class_accuracy=dict(r.per_class_accuracy),
            )
            for r in ordered
        ]
    )


def compare_sessions(track: ProgressTrack) -> ProgressSummary:
    """Session-to-session deltas, the best session and whether accuracy never dropped.

    Sessions without an overall accuracy take no part in deltas or the best pick.
    """
    if not track.entries:
        raise BadParameter("progress needs at least one session")
    scored = [e for e in track.entries if e.overall_accuracy is not None]
    deltas = [b.overall_accuracy - a.overall_accuracy for a, b in zip(scored, scored[1:])]

    best = track.entries[0]
    for e in scored:
        if best.overall_accuracy is None or e.overall_accuracy > best.overall_accuracy:
            best = e

    per_class: dict[StrokeClass, list[float]] = {}
    classes = sorted({cls for e in track.entries for cls in e.per_class_accuracy})
    for cls in classes:
        values = [e.per_class_accuracy[cls] for e in track.entries if cls in e.per_class_accuracy]
        per_class[cls] = [b - a for a, b in zip(values, values[1:])]

    return ProgressSummary(
        entries=list(track.entries),
        deltas=deltas,
        per_class_deltas=per_class,
        best_session=best.session_id,
        monotonic=all(d >= 0 for d in deltas),
    )


def progress_to_dict(summary: ProgressSummary) -> dict[str, Any]:
    return {
        "version": REPORT_VERSION,
        "sessions": [
            {
                "session_id": e.session_id,
                "timestamp": e.timestamp,
                "overall_accuracy": e.overall_accuracy,
                "per_class_accuracy": {cls.value: acc for cls, acc in e.per_class_accuracy.items()},
            }
            for e in summary.entries
        ],
        "deltas": summary.deltas,
        "per_class_deltas": {cls.value: d for cls, d in summary.per_class_deltas.items()},
        "best_session": summary.best_session,
        "monotonic": summary.monotonic,
    }


# --- markdown ---


def _fmt(value: float | None, digits: int = 2) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def _span(span: tuple[float, float] | None) -> str:
    return "-" if span is None else f"{span[0]:.2f}-{span[1]:.2f}"


def render_markdown(report: AssessmentReport, severity_threshold: float = 2.0) -> str:
    """Human-readable report; identical bytes for identical reports."""
    scored = sum(1 for r in report.strokes if r.accuracy is not None)
    lines = [
        f"# Assessment report: {report.session_id}",
        "",
        f"Subject: {report.subject_id}",
        "",
        "## Summary",
        "",
        "| Metric | Value |",
        "|---|---|",
        f"| Overall accuracy | {_fmt(report.overall_accuracy)} |",
        f"| Strokes scored | {scored} |",
        f"| Strokes unscored | {len(report.unscored)} |",
        f"| Faults detected | {len(report.faults)} |",
        "",
    ]

    if report.per_class_accuracy:
        lines += ["## Accuracy by stroke class", "", "| Class | Accuracy |", "|---|---|"]
        lines += [f"| {cls.value} | {_fmt(acc)} |" for cls, acc in report.per_class_accuracy.items()]
        lines.append("")

    shown = [f for f in report.top_faults if f.severity >= severity_threshold]
    if shown:
        lines += [
            "## Faults",
            "",
            "| # | Angle | Class | Severity (deg) | Max (deg) | Phase span | Direction | Strokes |",
            "|---|---|---|---|---|---|---|---|",
        ]
        lines += [
            f"| {i} | {f.angle_name} | {f.stroke_class.value} | {_fmt(f.severity)} | {_fmt(f.max_dev)} "
            f"| {_span(f.worst_phase_span)} | {f.direction} | {f.stroke_count} |"
            for i, f in enumerate(shown, start=1)
        ]
    else:
        lines += [
            "## No faults above threshold",
            "",
            f"No angle deviates by {severity_threshold:.1f} degrees or more on average.",
        ]
    lines.append("")

    if report.swing:
        lines += [
            "## Swing metrics",
            "",
            "| Class | Strokes | Head speed (m/s) | Force (N) | Arc (rad) | Energy (kcal) |",
            "|---|---|---|---|---|---|",
        ]
        lines += [
            f"| {s.stroke_class.value} | {s.count} | {_fmt(s.mean_head_speed)} | {_fmt(s.mean_force)} "
            f"| {_fmt(s.mean_radian)} | {_fmt(s.total_calories, 4)} |"
            for s in report.swing
        ]
        lines.append("")

    if report.heatmaps:
        lines += [
            "## Landing heatmaps",
            "",
            "| Origin zone | Class | Most probable zone | Landings | File |",
            "|---|---|---|---|---|",
        ]
        lines += [
            f"| {h.origin_zone} | {h.stroke_class.value} | {h.most_probable_zone} | {h.count} | {h.path} |"
            for h in report.heatmaps
        ]
        lines.append("")

    if report.validation_warnings:
        lines += ["## Validation warnings", ""]
        lines += [f"- {w}" for w in report.validation_warnings]
        lines.append("")

    if report.unscored:
        lines += ["## Unscored strokes", ""]
        lines += [f"- {u}" for u in report.unscored]
        lines.append("")

    return "\n".join(lines)


def render_progress_markdown(summary: ProgressSummary) -> str:
    lines = [
        "# Progress",
        "",
        "| Session | Recorded | Overall accuracy | Change |",
        "|---|---|---|---|",
    ]
    previous: float | None = None
    for e in summary.entries:
        change = "-"
        if e.overall_accuracy is not None and previous is not None:
            change = f"{e.overall_accuracy - previous:+.2f}"
        if e.overall_accuracy is not None:
            previous = e.overall_accuracy
        lines.append(f"| {e.session_id} | {e.timestamp or '-'} | {_fmt(e.overall_accuracy)} | {change} |")
    lines += [
        "",
        f"Best session: {summary.best_session}",
        "",
        f"Accuracy never dropped: {'yes' if summary.monotonic else 'no'}",
        "",
    ]
    return "\n".join(lines)
