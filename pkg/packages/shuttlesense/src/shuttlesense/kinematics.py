"""Joint-angle time series from skeleton sequences."""

from __future__ import annotations

import math

import numpy as np
import structlog
from numpy.lib.stride_tricks import sliding_window_view

from shuttlesense.config import KinematicsConfig
from shuttlesense.errors import BadParameter, BadWindow, DegenerateJoint, MissingTorso
from shuttlesense.types import (
    MID_HIP,
    NECK,
    AngleDefinition,
    JointAngleSeries,
    SkeletonFrame,
)

log = structlog.get_logger()

EPS = 1e-9


def angle_at_joint(a, b, c) -> float:
    """Angle at `b` between rays b->a and b->c, in degrees within [0, 180].

    Evaluated as atan2(|cross|, dot), which equals the arccos of the normalized
    dot product but keeps full precision near 0 and 180 degrees.
    """
    bax, bay = float(a[0]) - float(b[0]), float(a[1]) - float(b[1])
    bcx, bcy = float(c[0]) - float(b[0]), float(c[1]) - float(b[1])
    if math.hypot(bax, bay) <= EPS or math.hypot(bcx, bcy) <= EPS:
        raise DegenerateJoint(f"ray shorter than {EPS} px at ({float(b[0])}, {float(b[1])})")
    cross = bax * bcy - bay * bcx
    dot = bax * bcx + bay * bcy
    return math.degrees(math.atan2(abs(cross), dot))


def _angles_vectorized(xy: np.ndarray, present: np.ndarray, d: AngleDefinition) -> np.ndarray:
    """Per-frame angle for one definition over stacked (N, 25, 2) keypoints."""
    ba = xy[:, d.a] - xy[:, d.b]
    bc = xy[:, d.c] - xy[:, d.b]
    cross = ba[:, 0] * bc[:, 1] - ba[:, 1] * bc[:, 0]
    dot = (ba * bc).sum(axis=1)
    values = np.degrees(np.arctan2(np.abs(cross), dot))
    ok = present[:, d.a] & present[:, d.b] & present[:, d.c]
    ok &= np.hypot(ba[:, 0], ba[:, 1]) > EPS
    ok &= np.hypot(bc[:, 0], bc[:, 1]) > EPS
    return np.where(ok, values, np.nan)


def compute_angle_series(
    frames: list[SkeletonFrame],
    defs: list[AngleDefinition],
    fps: float = 30.0,
) -> list[JointAngleSeries]:
    """One series per definition; a frame missing any of a/b/c yields NaN."""
    if not defs:
        raise BadParameter("at least one angle definition is required")
    if not frames:
        return [JointAngleSeries(d.name, np.empty(0), fps) for d in defs]
    xy = np.stack([f.xy for f in frames])
    present = np.stack([f.present for f in frames])
    return [JointAngleSeries(d.name, _angles_vectorized(xy, present, d), fps) for d in defs]


def _missing_runs(values: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [start, end) index runs of NaN."""
    missing = np.isnan(values)
    if not missing.any():
        return []
    padded = np.concatenate([[False], missing, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def fill_gaps(series: JointAngleSeries, max_gap: int) -> JointAngleSeries:
    """Linearly interpolate interior missing runs no longer than `max_gap` frames."""
    if max_gap < 0:
        raise BadParameter(f"max_gap must be >= 0, got {max_gap}")
    values = series.values.astype(float).copy()
    n = len(values)
    for start, end in _missing_runs(values):
        if start == 0 or end == n or end - start > max_gap:
            continue
        left, right = values[start - 1], values[end]
        steps = np.arange(1, end - start + 1) / (end - start + 1)
        values[start:end] = left + (right - left) * steps
    return JointAngleSeries(series.angle_name, values, series.fps)


def smooth(series: JointAngleSeries, window: int) -> JointAngleSeries:
    """Centered moving average over present values; missing frames stay missing."""
    if window < 1 or window % 2 == 0:
        raise BadWindow(window)
    values = series.values.astype(float)
    if window == 1 or len(values) == 0:
        return JointAngleSeries(series.angle_name, values.copy(), series.fps)

    half = window // 2
    padded = np.pad(values, half, constant_values=np.nan)
    windows = sliding_window_view(padded, window)
    counts = np.sum(~np.isnan(windows), axis=1)
    sums = np.nansum(windows, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = sums / counts
    out = np.where(np.isnan(values), np.nan, means)
    return JointAngleSeries(series.angle_name, out, series.fps)


def normalize_skeleton(frame: SkeletonFrame) -> SkeletonFrame:
    """Translate MidHip to the origin and scale by the Neck-MidHip distance."""
    if not (frame.present[NECK] and frame.present[MID_HIP]):
        raise MissingTorso(f"frame {frame.frame_index}: Neck or MidHip not detected")
    origin = frame.xy[MID_HIP]
    scale = float(np.hypot(*(frame.xy[NECK] - origin)))
    if scale <= EPS:
        raise MissingTorso(f"frame {frame.frame_index}: Neck and MidHip coincide")
    return SkeletonFrame(
        frame_index=frame.frame_index,
        view_id=frame.view_id,
        xy=(frame.xy - origin) / scale,
        present=frame.present.copy(),
        confidence=frame.confidence.copy(),
    )


def normalize_sequence(frames: list[SkeletonFrame]) -> list[SkeletonFrame]:
    """Normalize every frame; frames without a torso become all-missing."""
    out: list[SkeletonFrame] = []
    dropped = 0
    for frame in frames:
        try:
            out.append(normalize_skeleton(frame))
        except MissingTorso:
            out.append(SkeletonFrame.empty(frame.frame_index, frame.view_id))
            dropped += 1
    if dropped:
        log.debug("torso_missing_frames", count=dropped, total=len(frames))
    return out


def densify(frames: list[SkeletonFrame]) -> list[SkeletonFrame]:
    """Insert all-missing frames for skipped indices so position = index - first."""
    if not frames:
        return []
    by_index = {f.frame_index: f for f in frames}
    first, last = frames[0].frame_index, frames[-1].frame_index
    view_id = frames[0].view_id
    return [
        by_index.get(i) or SkeletonFrame.empty(i, view_id)
        for i in range(first, last + 1)
    ]


def default_max_gap(fps: float, max_gap_s: float = 0.1) -> int:
    return int(round(max_gap_s * fps))


def default_smooth_window(fps: float, smooth_window_s: float = 0.15) -> int:
    """Nearest odd frame count to `smooth_window_s` seconds, at least 1."""
    return max(1, 2 * int(math.floor(smooth_window_s * fps / 2)) + 1)


def prepare_angle_series(
    frames: list[SkeletonFrame],
    config: KinematicsConfig,
    fps: float,
) -> list[JointAngleSeries]:
    """Compute, gap-fill and smooth every tracked angle."""
    max_gap = default_max_gap(fps, config.max_gap_s)
    window = default_smooth_window(fps, config.smooth_window_s)
    series = compute_angle_series(frames, config.angles, fps)
    prepared = [smooth(fill_gaps(s, max_gap), window) for s in series]
    log.debug("angle_series_prepared", angles=len(prepared), frames=len(frames), max_gap=max_gap, window=window)
    return prepared
