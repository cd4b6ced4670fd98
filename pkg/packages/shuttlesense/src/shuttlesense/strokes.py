"""Swing detection, stroke classification, per-stroke features and IMU swing metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog

from shuttlesense.config import StrokeConfig
from shuttlesense.errors import BadParameter, EmptyStroke, EmptyWindow
from shuttlesense.kinematics import fill_gaps
from shuttlesense.types import (
    L_WRIST,
    NECK,
    PHASE_SAMPLES,
    R_WRIST,
    Handedness,
    ImuTrace,
    JointAngleSeries,
    SkeletonFrame,
    StrokeClass,
    StrokeFeatures,
    StrokeSegment,
    SwingMetrics,
    TrajectorySpace,
    TrajectoryTrack,
)

log = structlog.get_logger()

SpeedTier = Literal["slow", "mid", "fast"]

JOULES_PER_KCAL = 4184.0


def racket_wrist(handedness: Handedness) -> int:
    return R_WRIST if handedness == Handedness.RIGHT else L_WRIST


def wrist_speed_series(
    frames: list[SkeletonFrame],
    handedness: Handedness,
    fps: float,
) -> np.ndarray:
    """Racket-hand wrist speed in torso-lengths/s from normalized frames.

    Central differences where both neighbours are present, one-sided where
    only one is, NaN where the wrist itself is missing.
    """
    n = len(frames)
    if n < 2:
        return np.full(n, np.nan)
    wrist = racket_wrist(handedness)
    pos = np.stack([f.xy[wrist] for f in frames])
    ok = np.array([bool(f.present[wrist]) for f in frames])
    idx = np.array([f.frame_index for f in frames], dtype=float)

    speed = np.full(n, np.nan)
    for i in range(n):
        if not ok[i]:
            continue
        has_prev = i > 0 and ok[i - 1]
        has_next = i < n - 1 and ok[i + 1]
        if has_prev and has_next:
            a, b = i - 1, i + 1
        elif has_next:
            a, b = i, i + 1
        elif has_prev:
            a, b = i - 1, i
        else:
            continue
        dist = float(np.hypot(*(pos[b] - pos[a])))
        speed[i] = dist / (idx[b] - idx[a]) * fps
    return speed


def _runs_above(values: np.ndarray, threshold: float) -> list[tuple[int, int]]:
    above = values >= threshold
    padded = np.concatenate([[False], above, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def segment_strokes(
    speed: np.ndarray,
    fps: float,
    s_trigger: float = 4.0,
    min_gap_s: float = 0.5,
    first_frame: int = 0,
    view_id: str = "",
    handedness: Handedness = Handedness.RIGHT,
) -> list[StrokeSegment]:
    """One stroke per run of speed >= s_trigger, widened to the flanking local minima.

    Runs whose peaks are closer than `min_gap_s` merge. Segments are sorted,
    never overlap, and span at least 3 frames.
    """
    if s_trigger <= 0:
        raise BadParameter(f"s_trigger must be > 0, got {s_trigger}")
    s = np.nan_to_num(np.asarray(speed, dtype=float), nan=0.0)
    n = len(s)
    min_gap_frames = min_gap_s * fps

    groups: list[list[int]] = []  # [start, end, peak], end exclusive
    for start, end in _runs_above(s, s_trigger):
        peak = start + int(np.argmax(s[start:end]))
        if groups and peak - groups[-1][2] < min_gap_frames:
            g = groups[-1]
            g[1] = end
            g[2] = g[0] + int(np.argmax(s[g[0]:end]))
        else:
            groups.append([start, end, peak])

    segments: list[StrokeSegment] = []
    prev_end = -1
    for start, end, peak in groups:
        lo = start
        while lo > 0 and s[lo - 1] < s[lo]:
            lo -= 1
        hi = end - 1
        while hi < n - 1 and s[hi + 1] < s[hi]:
            hi += 1
        lo = max(lo, prev_end + 1)
        if hi - lo < 3:
            log.debug("short_swing_dropped", peak=peak + first_frame, frames=hi - lo + 1)
            continue
        segments.append(
            StrokeSegment(
                start_frame=lo + first_frame,
                peak_frame=peak + first_frame,
                end_frame=hi + first_frame,
                view_id=view_id,
                handedness=handedness,
            )
        )
        prev_end = hi
    return segments


# --- classification ---


def speed_tier(peak_speed: float, config: StrokeConfig) -> SpeedTier:
    if peak_speed >= config.fast_speed:
        return "fast"
    if peak_speed < config.slow_speed:
        return "slow"
    return "mid"


def decide_stroke_class(
    overhead: bool,
    outgoing: float | None,
    tier: SpeedTier,
    threshold_deg: float = 20.0,
) -> StrokeClass:
    """Ordered decision table, first match wins. Missing outgoing counts as flat."""
    angle = 0.0 if outgoing is None else outgoing
    down = angle < -threshold_deg
    up = angle > threshold_deg
    if overhead and down and tier == "fast":
        return StrokeClass.SMASH
    if overhead and up:
        return StrokeClass.CLEAR
    if overhead and down:
        return StrokeClass.SLICE
    if not overhead and up:
        return StrokeClass.LIFT
    if tier == "slow":
        return StrokeClass.BLOCK
    return StrokeClass.DRIVE


def _frame_at(frames: list[SkeletonFrame], frame_index: int) -> SkeletonFrame | None:
    if not frames:
        return None
    pos = frame_index - frames[0].frame_index
    if 0 <= pos < len(frames) and frames[pos].frame_index == frame_index:
        return frames[pos]
    for f in frames:
        if f.frame_index == frame_index:
            return f
    return None


def contact_overhead(segment: StrokeSegment, frames: list[SkeletonFrame]) -> bool:
    """Racket wrist above the neck (smaller image y) at the peak frame."""
    frame = _frame_at(frames, segment.peak_frame)
    if frame is None:
        return False
    wrist = racket_wrist(segment.handedness)
    if not (frame.present[wrist] and frame.present[NECK]):
        return False
    return bool(frame.xy[wrist, 1] < frame.xy[NECK, 1])


def _outgoing_indices(
    track: TrajectoryTrack | None,
    peak_frame: int,
    stop_frame: int | None,
) -> np.ndarray:
    if track is None or len(track) == 0:
        return np.empty(0, dtype=int)
    mask = track.visible & (track.frames >= peak_frame)
    if stop_frame is not None:
        mask &= track.frames < stop_frame
    return np.flatnonzero(mask)


def outgoing_angle(
    track: TrajectoryTrack | None,
    peak_frame: int,
    stop_frame: int | None = None,
    n_frames: int = 5,
) -> float | None:
    """Launch elevation in degrees (+ up) over the first frames of the outgoing track."""
    idx = _outgoing_indices(track, peak_frame, stop_frame)
    if len(idx) < 2:
        return None
    f0 = track.frames[idx[0]]
    idx = idx[track.frames[idx] <= f0 + n_frames]
    if len(idx) < 2:
        return None
    i, j = idx[0], idx[-1]
    dx = track.x[j] - track.x[i]
    dy = track.y[j] - track.y[i]
    if track.space == TrajectorySpace.PIXEL:
        horizontal, vertical = abs(dx), -dy
    else:
        if track.z is None:
            return None
        horizontal, vertical = math.hypot(dx, dy), track.z[j] - track.z[i]
    if horizontal == 0 and vertical == 0:
        return None
    return math.degrees(math.atan2(vertical, horizontal))


def origin_and_landing(
    court_track: TrajectoryTrack | None,
    peak_frame: int,
    stop_frame: int | None = None,
) -> tuple[tuple[float, float] | None, tuple[float, float] | None]:
    """First and last visible court points of the outgoing track."""
    idx = _outgoing_indices(court_track, peak_frame, stop_frame)
    if len(idx) == 0:
        return None, None
    i, j = idx[0], idx[-1]
    return (
        (float(court_track.x[i]), float(court_track.y[i])),
        (float(court_track.x[j]), float(court_track.y[j])),
    )


@dataclass
class StrokeCues:
    overhead: bool
    peak_speed: float
    outgoing: float | None


def stroke_cues(
    segment: StrokeSegment,
    frames: list[SkeletonFrame],
    speed: np.ndarray,
    trajectory: TrajectoryTrack | None,
    config: StrokeConfig,
    stop_frame: int | None = None,
) -> StrokeCues:
    first = frames[0].frame_index if frames else 0
    window = speed[segment.start_frame - first: segment.end_frame - first + 1]
    peak_speed = float(np.nanmax(window)) if np.any(~np.isnan(window)) else 0.0
    return StrokeCues(
        overhead=contact_overhead(segment, frames),
        peak_speed=peak_speed,
        outgoing=outgoing_angle(trajectory, segment.peak_frame, stop_frame, config.outgoing_frames),
    )


def classify_stroke(
    segment: StrokeSegment,
    frames: list[SkeletonFrame],
    speed: np.ndarray,
    trajectory: TrajectoryTrack | None = None,
    config: StrokeConfig | None = None,
    stop_frame: int | None = None,
) -> StrokeClass:
    config = config or StrokeConfig()
    cues = stroke_cues(segment, frames, speed, trajectory, config, stop_frame)
    return decide_stroke_class(
        cues.overhead, cues.outgoing, speed_tier(cues.peak_speed, config), config.outgoing_threshold_deg
    )


# --- features ---


def resample_phase(values: np.ndarray, samples: int = PHASE_SAMPLES) -> np.ndarray:
    """Linear resampling of a gap-free window onto `samples` phase points."""
    n = len(values)
    if n == 1:
        return np.full(samples, float(values[0]))
    positions = np.linspace(0.0, n - 1, samples)
    return np.interp(positions, np.arange(n), values)


def extract_features(
    segment: StrokeSegment,
    frames: list[SkeletonFrame],
    angle_series: list[JointAngleSeries],
    speed: np.ndarray,
    trajectory: TrajectoryTrack | None,
    fps: float,
    config: StrokeConfig | None = None,
    max_gap: int = 0,
    court_track: TrajectoryTrack | None = None,
    stop_frame: int | None = None,
) -> StrokeFeatures:
    """Classify the stroke and resample each tracked angle to PHASE_SAMPLES points.

    An angle whose window still holds a gap longer than `max_gap` is marked
    missing for this stroke.
    """
    config = config or StrokeConfig()
    first = frames[0].frame_index if frames else 0
    lo, hi = segment.start_frame - first, segment.end_frame - first + 1

    phase: dict[str, np.ndarray | None] = {}
    enough = False
    for series in angle_series:
        window = series.values[lo:hi]
        present = int(np.sum(~np.isnan(window)))
        if present >= 3:
            enough = True
        if present < len(window):
            window = fill_gaps(JointAngleSeries(series.angle_name, window, fps), max_gap).values
        if len(window) == 0 or np.isnan(window).any():
            phase[series.angle_name] = None
        else:
            phase[series.angle_name] = resample_phase(window)
    if not enough:
        raise EmptyStroke(
            f"stroke {segment.start_frame}-{segment.end_frame} in view {segment.view_id}: "
            "fewer than 3 present samples for every angle"
        )

    cues = stroke_cues(segment, frames, speed, trajectory, config, stop_frame)
    stroke_class = decide_stroke_class(
        cues.overhead, cues.outgoing, speed_tier(cues.peak_speed, config), config.outgoing_threshold_deg
    )
    origin, landing = origin_and_landing(
        court_track if court_track is not None else trajectory, segment.peak_frame, stop_frame
    )
    return StrokeFeatures(
        segment=segment,
        stroke_class=stroke_class,
        contact_overhead=cues.overhead,
        peak_wrist_speed=cues.peak_speed,
        outgoing_angle=cues.outgoing,
        angle_phase=phase,
        origin=origin,
        landing=landing,
    )


# --- IMU ---


def swing_metrics(
    trace: ImuTrace,
    t_start: float,
    t_end: float,
    racket_mass: float = 0.09,
    r_eff: float = 0.6,
    efficiency: float = 0.25,
) -> SwingMetrics:
    """Speed, force, swept arc and energy cost of one swing window."""
    mask = (trace.t >= t_start) & (trace.t <= t_end)
    if not mask.any():
        raise EmptyWindow(t_start, t_end)
    t = trace.t[mask]
    omega = np.linalg.norm(trace.gyro[mask], axis=1)
    accel = np.linalg.norm(trace.accel[mask], axis=1)

    head_speed = float(omega.max()) * r_eff
    force = racket_mass * float(accel.max())
    radian = float(np.sum(0.5 * (omega[1:] + omega[:-1]) * np.diff(t))) if len(t) > 1 else 0.0
    calories = (0.5 * racket_mass * head_speed**2 / efficiency) / JOULES_PER_KCAL
    return SwingMetrics(head_speed=head_speed, force=force, radian=radian, calories=calories)


def segment_time_window(segment: StrokeSegment, fps: float, imu_offset_s: float = 0.0) -> tuple[float, float]:
    return imu_offset_s + segment.start_frame / fps, imu_offset_s + segment.end_frame / fps
