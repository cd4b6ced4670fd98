"""Session orchestration: ingest, kinematics, strokes, scoring and heatmaps."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import structlog

from shuttlesense.config import AnalysisConfig
from shuttlesense.court import accumulate_landings
from shuttlesense.errors import EmptyStroke, EmptyWindow, UnknownClass
from shuttlesense.ingest import (
    load_manifest,
    parse_imu,
    parse_pose_frames,
    parse_trajectory,
    to_court_space,
    validate_session,
)
from shuttlesense.kinematics import default_max_gap, densify, normalize_sequence, prepare_angle_series
from shuttlesense.logging import session_context
from shuttlesense.reference import apply_hard_limits, score_stroke
from shuttlesense.report import stroke_label
from shuttlesense.strokes import extract_features, segment_strokes, segment_time_window, swing_metrics, wrist_speed_series
from shuttlesense.types import (
    EnvelopeModel,
    ImuTrace,
    JointAngleSeries,
    LandingHeatmap,
    LandingObservation,
    SessionManifest,
    SkeletonFrame,
    StrokeClass,
    StrokeFeatures,
    StrokeScore,
    StrokeSegment,
    SwingMetrics,
    TrajectoryTrack,
    ValidationReport,
    ViewEntry,
    ZoneGrid,
)

log = structlog.get_logger()


@dataclass
class AnalyzerStats:
    """Counters collected while analyzing sessions."""

    views: int = 0
    frames: int = 0
    segments: int = 0
    empty_strokes: int = 0
    imu_windows_empty: int = 0
    unknown_class: int = 0
    landings_skipped: int = 0
    classes: dict[str, int] = field(default_factory=lambda: {c.value: 0 for c in StrokeClass})


@dataclass
class ViewAnalysis:
    view: ViewEntry
    frames: list[SkeletonFrame]  # dense, normalized
    angles: list[JointAngleSeries]
    speed: np.ndarray
    segments: list[StrokeSegment]
    features: list[StrokeFeatures]
    swings: list[tuple[StrokeClass, SwingMetrics]]
    court_track: TrajectoryTrack | None
    dropped: list[str] = field(default_factory=list)


@dataclass
class SessionAnalysis:
    manifest: SessionManifest
    validation: ValidationReport
    views: list[ViewAnalysis] = field(default_factory=list)

    @property
    def features(self) -> list[StrokeFeatures]:
        return [f for v in self.views for f in v.features]

    @property
    def swings(self) -> list[tuple[StrokeClass, SwingMetrics]]:
        return [s for v in self.views for s in v.swings]

    @property
    def dropped(self) -> list[str]:
        return [d for v in self.views for d in v.dropped]

    def landings(self) -> list[LandingObservation]:
        """Landing observations of the first view that carries a trajectory."""
        for v in self.views:
            if v.court_track is not None:
                return [LandingObservation(f.stroke_class, f.origin, f.landing) for f in v.features]
        return []


class SessionAnalyzer:
    """Runs the assessment pipeline over session manifests."""

    def __init__(self, config: AnalysisConfig | None = None) -> None:
        self.config = config or AnalysisConfig()
        self.stats = AnalyzerStats()

    def load_and_validate(
        self,
        manifest_path: str | Path,
    ) -> tuple[SessionManifest, dict[str, list[SkeletonFrame]], dict[str, ImuTrace], ValidationReport]:
        manifest = load_manifest(manifest_path)
        frames_by_view = {
            v.view_id: parse_pose_frames(v.pose_dir, self.config.ingest.confidence_floor, v.view_id)
            for v in manifest.views
        }
        traces = {v.view_id: parse_imu(v.imu_path) for v in manifest.views if v.imu_path is not None}
        report = validate_session(manifest, frames_by_view, self.config, traces)
        return manifest, frames_by_view, traces, report

    def analyze_session(self, manifest_path: str | Path) -> SessionAnalysis:
        """Analyze every view; a session failing validation comes back without views."""
        manifest, frames_by_view, traces, report = self.load_and_validate(manifest_path)
        analysis = SessionAnalysis(manifest=manifest, validation=report)
        with session_context(manifest.session_id, role=manifest.role.value):
            if report.failed:
                log.warning("session_failed_validation", failures=sum(c.status == "fail" for c in report.checks))
                return analysis
            for view in manifest.views:
                analysis.views.append(
                    self.analyze_view(manifest, view, frames_by_view[view.view_id], traces.get(view.view_id))
                )
            log.info("session_analyzed", views=len(analysis.views), strokes=len(analysis.features))
        return analysis

    def analyze_view(
        self,
        manifest: SessionManifest,
        view: ViewEntry,
        raw_frames: list[SkeletonFrame],
        trace: ImuTrace | None = None,
    ) -> ViewAnalysis:
        cfg = self.config
        fps = manifest.fps
        self.stats.views += 1

        dense = densify(raw_frames)
        self.stats.frames += len(dense)
        # joint angles are similarity invariant, so they come from the raw pixels
        angles = prepare_angle_series(dense, cfg.kinematics, fps)
        frames = normalize_sequence(dense)
        speed = wrist_speed_series(frames, manifest.handedness, fps)
        first = frames[0].frame_index if frames else 0
        segments = segment_strokes(
            speed,
            fps,
            cfg.strokes.s_trigger,
            cfg.strokes.min_gap_s,
            first_frame=first,
            view_id=view.view_id,
            handedness=manifest.handedness,
        )
        self.stats.segments += len(segments)
        log.info("strokes_segmented", view_id=view.view_id, count=len(segments))

        track = parse_trajectory(view.trajectory_path, view.trajectory_space) if view.trajectory_path else None
        court_track = to_court_space(track, view.homography) if track is not None else None

        max_gap = default_max_gap(fps, cfg.kinematics.max_gap_s)
        features: list[StrokeFeatures] = []
        swings: list[tuple[StrokeClass, SwingMetrics]] = []
        dropped: list[str] = []
        for i, seg in enumerate(segments):
            stop = segments[i + 1].start_frame if i + 1 < len(segments) else None
            try:
                feat = extract_features(
                    seg, frames, angles, speed, track, fps, cfg.strokes, max_gap, court_track, stop
                )
            except EmptyStroke as e:
                log.warning("stroke_dropped", view_id=view.view_id, reason=str(e))
                self.stats.empty_strokes += 1
                dropped.append(stroke_label(view.view_id, seg.start_frame, seg.end_frame))
                continue
            features.append(feat)
            self.stats.classes[feat.stroke_class.value] += 1

            if trace is not None:
                t0, t1 = segment_time_window(seg, fps, view.imu_offset_s)
                try:
                    swings.append((
                        feat.stroke_class,
                        swing_metrics(trace, t0, t1, cfg.strokes.racket_mass, cfg.strokes.r_eff,
                                      cfg.strokes.efficiency),
                    ))
                except EmptyWindow as e:
                    log.warning("swing_window_empty", view_id=view.view_id, reason=str(e))
                    self.stats.imu_windows_empty += 1

        return ViewAnalysis(
            view=view,
            frames=frames,
            angles=angles,
            speed=speed,
            segments=segments,
            features=features,
            swings=swings,
            court_track=court_track,
            dropped=dropped,
        )

    def score(self, features: list[StrokeFeatures], model: EnvelopeModel) -> tuple[list[StrokeScore], list[str]]:
        """Score strokes; strokes of classes the model lacks are returned by label."""
        model = apply_hard_limits(model, self.config.reference.hard_limits)
        scores: list[StrokeScore] = []
        unknown: list[str] = []
        for feat in features:
            try:
                scores.append(score_stroke(feat, model, self.config.reference.d_norm))
            except UnknownClass as e:
                log.warning("stroke_class_not_in_envelope", stroke_class=e.stroke_class)
                self.stats.unknown_class += 1
                seg = feat.segment
                unknown.append(stroke_label(seg.view_id, seg.start_frame, seg.end_frame))
        return scores, unknown

    def heatmaps(
        self,
        observations: list[LandingObservation],
    ) -> dict[tuple[int, StrokeClass], LandingHeatmap]:
        grid = ZoneGrid(self.config.court.rows, self.config.court.cols)
        heatmaps, skipped = accumulate_landings(observations, grid, self.config.court)
        self.stats.landings_skipped += skipped
        return heatmaps
