"""File output for sessions, dumps and heatmaps, and canonical JSON."""

from __future__ import annotations

import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from shuttlesense.court import render_pgm
from shuttlesense.errors import MalformedFile
from shuttlesense.types import (
    ImuTrace,
    JointAngleSeries,
    LandingHeatmap,
    SkeletonFrame,
    StrokeFeatures,
    TrajectoryTrack,
)

FLOAT_DIGITS = 9


# --- canonical JSON ---


def canonical(value: Any) -> Any:
    """JSON-ready copy: floats at 9 significant digits, NaN as null, enums as values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{FLOAT_DIGITS}g}")
    if isinstance(value, np.ndarray):
        return [canonical(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(canonical(k)): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, Path):
        return value.as_posix()
    return value


def dumps_canonical(data: Any) -> str:
    return json.dumps(canonical(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(data: Any, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_canonical(data), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedFile(path, str(e)) from e


# --- session files ---


def pose_file_name(prefix: str, frame_index: int) -> str:
    return f"{prefix}_{frame_index:012d}_keypoints.json"


def write_pose_frame(frame: SkeletonFrame, directory: str | Path, prefix: str = "frame") -> Path:
    """Write one frame in the pose estimator's per-frame JSON layout.

    Slots that are not present are written with confidence 0.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    kp = np.column_stack([frame.xy, np.where(frame.present, frame.confidence, 0.0)])
    people = []
    if frame.present.any():
        people.append({"person_id": [-1], "pose_keypoints_2d": [float(v) for v in kp.ravel()]})
    path = directory / pose_file_name(prefix, frame.frame_index)
    path.write_text(json.dumps({"version": 1.3, "people": people}) + "\n", encoding="utf-8")
    return path


def write_trajectory(track: TrajectoryTrack, path: str | Path) -> None:
    """Write a `Frame,Visibility,X,Y` track, with a `Z` column when the track has heights."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    has_z = track.z is not None
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["Frame", "Visibility", "X", "Y"] + (["Z"] if has_z else []))
        for i in range(len(track)):
            row = [int(track.frames[i]), int(track.visible[i]), f"{track.x[i]:.6f}", f"{track.y[i]:.6f}"]
            if has_z:
                row.append(f"{track.z[i]:.6f}")
            writer.writerow(row)


def write_imu(trace: ImuTrace, path: str | Path) -> None:
    df = pd.DataFrame(
        np.column_stack([trace.t, trace.accel, trace.gyro]),
        columns=["t", "ax", "ay", "az", "gx", "gy", "gz"],
    )
    df.to_csv(path, index=False, float_format="%.9g", lineterminator="\n")


# --- dumps ---


def write_angle_dump(series: list[JointAngleSeries], first_frame: int, path: str | Path) -> None:
    """One row per frame, one column per angle; missing values left empty."""
    n = len(series[0]) if series else 0
    df = pd.DataFrame({"frame": np.arange(first_frame, first_frame + n)})
    for s in series:
        df[s.angle_name] = s.values
    df.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")


def write_stroke_dump(strokes: list[StrokeFeatures], path: str | Path) -> None:
    rows = [
        {
            "view_id": f.segment.view_id,
            "start_frame": f.segment.start_frame,
            "peak_frame": f.segment.peak_frame,
            "end_frame": f.segment.end_frame,
            "stroke_class": str(f.stroke_class),
            "contact_overhead": f.contact_overhead,
            "peak_wrist_speed": f.peak_wrist_speed,
            "outgoing_angle": f.outgoing_angle,
            "landing_x": f.landing[0] if f.landing else None,
            "landing_y": f.landing[1] if f.landing else None,
        }
        for f in strokes
    ]
    columns = [
        "view_id", "start_frame", "peak_frame", "end_frame", "stroke_class", "contact_overhead",
        "peak_wrist_speed", "outgoing_angle", "landing_x", "landing_y",
    ]
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False, float_format="%.6f", lineterminator="\n")


def write_heatmap(heatmap: LandingHeatmap, path: str | Path) -> None:
    """Write a heatmap as a P2 image (.pgm) or raw cell values (.csv)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".pgm":
        path.write_text(render_pgm(heatmap), encoding="utf-8")
    else:
        pd.DataFrame(heatmap.grid).to_csv(path, index=False, header=False, float_format="%.9g", lineterminator="\n")
