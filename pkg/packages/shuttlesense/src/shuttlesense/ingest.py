"""Parsing and validation of session inputs: pose frames, tracks, IMU traces, manifests."""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import structlog

from shuttlesense.config import AnalysisConfig, IngestConfig
from shuttlesense.errors import (
    BadKeypointCount,
    BadParameter,
    EmptySession,
    MalformedFile,
    MalformedRow,
    ManifestError,
    NonMonotoneFrames,
    UsageError,
)
from shuttlesense.types import (
    KEYPOINT_NAMES,
    NUM_KEYPOINTS,
    Handedness,
    ImuTrace,
    Role,
    SessionManifest,
    SkeletonFrame,
    TrajectorySpace,
    TrajectoryTrack,
    ValidationCheck,
    ValidationReport,
    ViewEntry,
)

log = structlog.get_logger()

POSE_FILE_RE = re.compile(r"^(?P<prefix>.*)_(?P<index>\d+)_keypoints\.json$")
TRAJECTORY_HEADER = ["Frame", "Visibility", "X", "Y"]
IMU_COLUMNS = ["t", "ax", "ay", "az", "gx", "gy", "gz"]


# --- manifest ---


def load_manifest(path: str | Path) -> SessionManifest:
    """Read a session manifest; relative paths resolve against its directory.

    Every trajectory and IMU file the views name must exist.
    """
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"manifest not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedFile(path, str(e)) from e
    manifest = manifest_from_dict(data, base_dir=path.parent)
    manifest.source_path = path
    for view in manifest.views:
        for what, source in (("trajectory", view.trajectory_path), ("IMU", view.imu_path)):
            if source is not None and not source.is_file():
                raise UsageError(f"view {view.view_id}: {what} file not found: {source}")
    return manifest


def manifest_from_dict(data: dict[str, Any], base_dir: Path | None = None) -> SessionManifest:
    base_dir = base_dir or Path(".")

    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base_dir / p

    try:
        views = [
            ViewEntry(
                view_id=str(v["view_id"]),
                camera_angle_deg=float(v["camera_angle_deg"]),
                pose_dir=resolve(v["pose_dir"]),
                trajectory_path=resolve(v.get("trajectory_path")),
                imu_path=resolve(v.get("imu_path")),
                imu_offset_s=float(v.get("imu_offset_s", 0.0)),
                trajectory_space=TrajectorySpace(v.get("trajectory_space", "court")),
                homography=v.get("homography"),
            )
            for v in data["views"]
        ]
        manifest = SessionManifest(
            session_id=str(data["session_id"]),
            subject_id=str(data["subject_id"]),
            role=Role(data["role"]),
            views=views,
            fps=float(data["fps"]),
            handedness=Handedness(data.get("handedness", "right")),
            recorded_at=data.get("recorded_at"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ManifestError(f"invalid manifest: {e}") from e

    if not 1 <= len(manifest.views) <= 3:
        raise ManifestError(f"manifest must list 1 to 3 views, got {len(manifest.views)}")
    angles = [v.camera_angle_deg % 360.0 for v in manifest.views]
    if len(set(angles)) != len(angles):
        raise ManifestError("view camera angles must be distinct")
    if len({v.view_id for v in manifest.views}) != len(manifest.views):
        raise ManifestError("view ids must be distinct")
    if not manifest.fps > 0:
        raise ManifestError("fps must be > 0")
    for v in manifest.views:
        if v.homography is not None and np.asarray(v.homography, dtype=float).shape != (3, 3):
            raise ManifestError(f"view {v.view_id}: homography must be 3x3")
    return manifest


def manifest_to_dict(manifest: SessionManifest, base_dir: Path | None = None) -> dict[str, Any]:
    def rel(p: Path | None) -> str | None:
        if p is None:
            return None
        if base_dir is not None:
            try:
                return p.relative_to(base_dir).as_posix()
            except ValueError:
                pass
        return p.as_posix()

    views = []
    for v in manifest.views:
        entry: dict[str, Any] = {
            "view_id": v.view_id,
            "camera_angle_deg": v.camera_angle_deg,
            "pose_dir": rel(v.pose_dir),
            "imu_offset_s": v.imu_offset_s,
            "trajectory_space": v.trajectory_space.value,
        }
        if v.trajectory_path is not None:
            entry["trajectory_path"] = rel(v.trajectory_path)
        if v.imu_path is not None:
            entry["imu_path"] = rel(v.imu_path)
        if v.homography is not None:
            entry["homography"] = v.homography
        views.append(entry)
    data: dict[str, Any] = {
        "session_id": manifest.session_id,
        "subject_id": manifest.subject_id,
        "role": manifest.role.value,
        "fps": manifest.fps,
        "handedness": manifest.handedness.value,
        "views": views,
    }
    if manifest.recorded_at is not None:
        data["recorded_at"] = manifest.recorded_at
    return data


# --- pose frames ---


def _select_person(people: list[list[float]], path: Path) -> np.ndarray | None:
    """Pick the person with the largest keypoint bounding box."""
    best: np.ndarray | None = None
    best_area = -1.0
    for raw in people:
        if len(raw) != NUM_KEYPOINTS * 3:
            raise BadKeypointCount(path, len(raw))
        kp = np.asarray(raw, dtype=float).reshape(NUM_KEYPOINTS, 3)
        if not np.all(np.isfinite(kp)):
            raise MalformedFile(path, "non-finite keypoint value")
        detected = kp[:, 2] > 0
        if detected.any():
            xs, ys = kp[detected, 0], kp[detected, 1]
            area = float((xs.max() - xs.min()) * (ys.max() - ys.min()))
        else:
            area = 0.0
        if area > best_area:
            best, best_area = kp, area
    return best


def parse_pose_file(
    path: Path,
    frame_index: int,
    confidence_floor: float = 0.1,
    view_id: str = "",
) -> SkeletonFrame:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        people = [p["pose_keypoints_2d"] for p in data["people"]]
    except (json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as e:
        raise MalformedFile(path, str(e)) from e

    try:
        kp = _select_person(people, path)
    except (TypeError, ValueError) as e:
        raise MalformedFile(path, str(e)) from e
    if kp is None:
        return SkeletonFrame.empty(frame_index, view_id)

    confidence = kp[:, 2].copy()
    present = (confidence > 0) & (confidence >= confidence_floor)
    return SkeletonFrame(
        frame_index=frame_index,
        view_id=view_id,
        xy=kp[:, :2].copy(),
        present=present,
        confidence=confidence,
    )


def parse_pose_frames(
    directory: str | Path,
    confidence_floor: float = 0.1,
    view_id: str = "",
) -> list[SkeletonFrame]:
    """Parse one `<prefix>_<frameidx>_keypoints.json` file per frame, ordered by index."""
    if not 0.0 <= confidence_floor <= 1.0:
        raise BadParameter(f"confidence_floor must be in [0, 1], got {confidence_floor}")
    directory = Path(directory)
    if not directory.is_dir():
        raise EmptySession(directory)

    indexed: dict[int, Path] = {}
    for path in directory.glob("*_keypoints.json"):
        m = POSE_FILE_RE.match(path.name)
        if m is None:
            raise MalformedFile(path, "file name carries no frame index")
        index = int(m.group("index"))
        if index in indexed:
            raise MalformedFile(path, f"duplicate frame index {index} (also {indexed[index].name})")
        indexed[index] = path

    if not indexed:
        raise EmptySession(directory)

    frames = [
        parse_pose_file(indexed[i], i, confidence_floor, view_id)
        for i in sorted(indexed)
    ]
    log.info(
        "pose_frames_parsed",
        directory=str(directory),
        view_id=view_id,
        frames=len(frames),
        first=frames[0].frame_index,
        last=frames[-1].frame_index,
    )
    return frames


# --- trajectory ---


def parse_trajectory(
    path: str | Path,
    space: TrajectorySpace = TrajectorySpace.COURT,
) -> TrajectoryTrack:
    """Parse a `Frame,Visibility,X,Y[,Z]` track; invisible rows are kept."""
    path = Path(path)
    frames: list[int] = []
    visible: list[bool] = []
    xs: list[float] = []
    ys: list[float] = []
    zs: list[float] = []

    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise MalformedFile(path, str(e)) from e

    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None:
        raise MalformedRow(1, "missing header")
    header = [h.strip() for h in header]
    if header not in (TRAJECTORY_HEADER, TRAJECTORY_HEADER + ["Z"]):
        raise MalformedRow(1, f"unexpected header {','.join(header)}")
    has_z = len(header) == 5

    for row in reader:
        line_no = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
        try:
            frame = int(row[0])
            vis = int(row[1])
            values = [float(cell) for cell in row[2:]]
        except ValueError as e:
            raise MalformedRow(line_no, str(e)) from e
        if frame < 0 or vis not in (0, 1) or not all(math.isfinite(v) for v in values):
            raise MalformedRow(line_no, "frame must be >= 0, visibility 0 or 1, coordinates finite")
        if frames and frame <= frames[-1]:
            raise NonMonotoneFrames(line_no, frames[-1], frame)
        if vis == 0:
            values = [0.0] * len(values)
        frames.append(frame)
        visible.append(vis == 1)
        xs.append(values[0])
        ys.append(values[1])
        if has_z:
            zs.append(values[2])

    track = TrajectoryTrack(
        frames=np.asarray(frames, dtype=int),
        visible=np.asarray(visible, dtype=bool),
        x=np.asarray(xs, dtype=float),
        y=np.asarray(ys, dtype=float),
        space=space,
        z=np.asarray(zs, dtype=float) if has_z else None,
    )
    log.debug("trajectory_parsed", path=str(path), samples=len(track), visible=int(track.visible.sum()))
    return track


def to_court_space(track: TrajectoryTrack, homography: list[list[float]] | None) -> TrajectoryTrack:
    """Map a pixel-space track onto the court plane; court tracks pass through."""
    if track.space == TrajectorySpace.COURT:
        return track
    h = np.eye(3) if homography is None else np.asarray(homography, dtype=float)
    pts = np.stack([track.x, track.y, np.ones(len(track))])
    mapped = h @ pts
    with np.errstate(divide="ignore", invalid="ignore"):
        cx = np.where(track.visible, mapped[0] / mapped[2], 0.0)
        cy = np.where(track.visible, mapped[1] / mapped[2], 0.0)
    return TrajectoryTrack(
        frames=track.frames.copy(),
        visible=track.visible.copy(),
        x=cx,
        y=cy,
        space=TrajectorySpace.COURT,
        z=None,
    )


# --- IMU ---


def parse_imu(path: str | Path) -> ImuTrace:
    """Parse a `t,ax,ay,az,gx,gy,gz` trace in SI units."""
    path = Path(path)
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise MalformedFile(path, str(e)) from e
    df.columns = [str(c).strip() for c in df.columns]
    if list(df.columns) != IMU_COLUMNS:
        raise MalformedFile(path, f"expected columns {','.join(IMU_COLUMNS)}")
    try:
        values = df.to_numpy(dtype=float)
    except ValueError as e:
        raise MalformedFile(path, str(e)) from e
    if not np.all(np.isfinite(values)):
        raise MalformedFile(path, "non-finite IMU value")

    t = values[:, 0]
    steps = np.diff(t)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0))
        # header is line 1, first sample line 2
        raise NonMonotoneFrames(bad + 3, float(t[bad]), float(t[bad + 1]))
    return ImuTrace(t=t, accel=values[:, 1:4], gyro=values[:, 4:7])


# --- validation ---


def _tracked_joints(config: AnalysisConfig) -> list[int]:
    return sorted({a.b for a in config.kinematics.angles})


def _view_layout_check(manifest: SessionManifest, cfg: IngestConfig) -> ValidationCheck:
    n = len(manifest.views)
    if n < 3:
        label = "single-view session" if n == 1 else f"{n}-view session"
        return ValidationCheck("view_layout", "warn", f"{label}: three views at 120 degrees recommended")
    angles = sorted(v.camera_angle_deg % 360.0 for v in manifest.views)
    gaps = [angles[1] - angles[0], angles[2] - angles[1], 360.0 - angles[2] + angles[0]]
    if all(abs(g - 120.0) <= cfg.angle_tolerance_deg for g in gaps):
        return ValidationCheck("view_layout", "pass", "3 views at mutual 120 degrees")
    shown = ", ".join(f"{g:.1f}" for g in gaps)
    return ValidationCheck("view_layout", "warn", f"3 views but spacing is {shown} degrees, not 120")


def _visibility_check(
    view_id: str,
    frames: list[SkeletonFrame],
    joints: list[int],
    v_min: float,
) -> ValidationCheck:
    if not frames:
        return ValidationCheck("visibility", "fail", f"view {view_id}: no frames", view_id)
    present = np.stack([f.present for f in frames])
    ratios = present[:, joints].mean(axis=0)
    failing = [
        f"{KEYPOINT_NAMES[j]} visible in {100 * r:.1f}% of frames"
        for j, r in zip(joints, ratios)
        if r < v_min
    ]
    if failing:
        message = f"view {view_id}: " + "; ".join(failing) + f" (min {100 * v_min:.1f}%)"
        return ValidationCheck("visibility", "fail", message, view_id)
    worst = float(ratios.min())
    return ValidationCheck(
        "visibility", "pass", f"view {view_id}: tracked joints visible in >= {100 * worst:.1f}% of frames", view_id
    )


def _imu_alignment_check(
    view: ViewEntry,
    frames: list[SkeletonFrame],
    trace: ImuTrace,
    fps: float,
) -> ValidationCheck:
    if not frames or len(trace) == 0:
        return ValidationCheck("imu_alignment", "warn", f"view {view.view_id}: empty IMU trace or video", view.view_id)
    start = view.imu_offset_s + frames[0].frame_index / fps
    end = view.imu_offset_s + frames[-1].frame_index / fps
    if trace.t[-1] < start or trace.t[0] > end:
        return ValidationCheck(
            "imu_alignment",
            "warn",
            f"view {view.view_id}: IMU trace [{trace.t[0]:.3f}, {trace.t[-1]:.3f}] s "
            f"misses video span [{start:.3f}, {end:.3f}] s",
            view.view_id,
        )
    return ValidationCheck("imu_alignment", "pass", f"view {view.view_id}: IMU overlaps video", view.view_id)


def validate_session(
    manifest: SessionManifest,
    frames_by_view: dict[str, list[SkeletonFrame]],
    config: AnalysisConfig | None = None,
    traces: dict[str, ImuTrace] | None = None,
) -> ValidationReport:
    """Check a session against the capture criteria. Always returns a report."""
    config = config or AnalysisConfig()
    traces = traces or {}
    report = ValidationReport(session_id=manifest.session_id)

    report.checks.append(_view_layout_check(manifest, config.ingest))

    joints = _tracked_joints(config)
    for view in manifest.views:
        frames = frames_by_view.get(view.view_id, [])
        report.checks.append(_visibility_check(view.view_id, frames, joints, config.ingest.v_min))

    if manifest.fps > 0:
        report.checks.append(ValidationCheck("fps", "pass", f"fps declared: {manifest.fps:g}"))
    else:
        report.checks.append(ValidationCheck("fps", "fail", "fps missing or not positive"))

    for view in manifest.views:
        if view.view_id in traces:
            report.checks.append(
                _imu_alignment_check(view, frames_by_view.get(view.view_id, []), traces[view.view_id], manifest.fps)
            )

    log.info(
        "session_validated",
        session_id=manifest.session_id,
        failed=report.failed,
        warnings=len(report.warnings),
    )
    return report
