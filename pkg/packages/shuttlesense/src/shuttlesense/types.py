"""Core types for the shuttlesense badminton assessment pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from pathlib import Path
from typing import Literal

import numpy as np

NUM_KEYPOINTS = 25
PHASE_SAMPLES = 64

# BODY-25 slot order of the upstream pose estimator
KEYPOINT_NAMES: tuple[str, ...] = (
    "Nose", "Neck", "RShoulder", "RElbow", "RWrist", "LShoulder", "LElbow",
    "LWrist", "MidHip", "RHip", "RKnee", "RAnkle", "LHip", "LKnee", "LAnkle",
    "REye", "LEye", "REar", "LEar", "LBigToe", "LSmallToe", "LHeel",
    "RBigToe", "RSmallToe", "RHeel",
)
NECK = 1
R_WRIST = 4
L_WRIST = 7
MID_HIP = 8


class Role(StrEnum):
    REFERENCE = "reference"
    TRAINEE = "trainee"


class Handedness(StrEnum):
    RIGHT = "right"
    LEFT = "left"


class TrajectorySpace(StrEnum):
    PIXEL = "pixel"
    COURT = "court"


class StrokeClass(StrEnum):
    SMASH = "Smash"
    LIFT = "Lift"
    CLEAR = "Clear"
    BLOCK = "Block"
    SLICE = "Slice"
    DRIVE = "Drive"


# --- ingest ---


@dataclass
class ViewEntry:
    view_id: str
    camera_angle_deg: float
    pose_dir: Path
    trajectory_path: Path | None = None
    imu_path: Path | None = None
    imu_offset_s: float = 0.0
    trajectory_space: TrajectorySpace = TrajectorySpace.COURT
    homography: list[list[float]] | None = None


@dataclass
class SessionManifest:
    session_id: str
    subject_id: str
    role: Role
    views: list[ViewEntry]
    fps: float
    handedness: Handedness = Handedness.RIGHT
    recorded_at: str | None = None
    source_path: Path | None = None


@dataclass
class SkeletonFrame:
    """One frame of BODY-25 keypoints; `present[i]` False means slot i is ignored."""

    frame_index: int
    view_id: str
    xy: np.ndarray  # (25, 2)
    present: np.ndarray  # (25,) bool
    confidence: np.ndarray  # (25,)

    @classmethod
    def empty(cls, frame_index: int, view_id: str) -> SkeletonFrame:
        return cls(
            frame_index=frame_index,
            view_id=view_id,
            xy=np.zeros((NUM_KEYPOINTS, 2)),
            present=np.zeros(NUM_KEYPOINTS, dtype=bool),
            confidence=np.zeros(NUM_KEYPOINTS),
        )


@dataclass
class TrajectoryTrack:
    frames: np.ndarray  # int, strictly increasing
    visible: np.ndarray  # bool
    x: np.ndarray
    y: np.ndarray
    space: TrajectorySpace = TrajectorySpace.COURT
    z: np.ndarray | None = None  # height in meters, court space only

    def __len__(self) -> int:
        return len(self.frames)


@dataclass
class ImuTrace:
    t: np.ndarray  # seconds, strictly increasing
    accel: np.ndarray  # (N, 3) m/s^2
    gyro: np.ndarray  # (N, 3) rad/s

    def __len__(self) -> int:
        return len(self.t)


CheckStatus = Literal["pass", "warn", "fail"]


@dataclass
class ValidationCheck:
    name: str
    status: CheckStatus
    message: str
    view_id: str | None = None


@dataclass
class ValidationReport:
    session_id: str
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    @property
    def warnings(self) -> list[str]:
        return [c.message for c in self.checks if c.status == "warn"]


# --- kinematics ---


@dataclass(frozen=True)
class AngleDefinition:
    """Angle at keypoint `b` between rays b->a and b->c, degrees in [0, 180]."""

    name: str
    a: int
    b: int
    c: int


@dataclass
class JointAngleSeries:
    angle_name: str
    values: np.ndarray  # degrees, NaN = missing
    fps: float

    def __len__(self) -> int:
        return len(self.values)


# --- strokes ---


@dataclass
class StrokeSegment:
    start_frame: int
    peak_frame: int
    end_frame: int
    view_id: str = ""
    handedness: Handedness = Handedness.RIGHT


@dataclass
class StrokeFeatures:
    segment: StrokeSegment
    stroke_class: StrokeClass
    contact_overhead: bool
    peak_wrist_speed: float  # torso-lengths / s
    outgoing_angle: float | None  # degrees, + up
    angle_phase: dict[str, np.ndarray | None]  # PHASE_SAMPLES values or None
    origin: tuple[float, float] | None = None  # court meters
    landing: tuple[float, float] | None = None  # court meters


@dataclass
class SwingMetrics:
    head_speed: float  # m/s
    force: float  # N
    radian: float  # rad
    calories: float  # kcal


# --- reference ---


@dataclass
class EnvelopeBand:
    lo: np.ndarray
    hi: np.ndarray
    support_count: int


@dataclass
class EnvelopeModel:
    p_lo: float
    p_hi: float
    n_min: int
    bands: dict[tuple[StrokeClass, str], EnvelopeBand] = field(default_factory=dict)
    excluded: list[tuple[StrokeClass, str, int]] = field(default_factory=list)

    def classes(self) -> set[StrokeClass]:
        return {cls for cls, _ in self.bands}


Direction = Literal["above", "below"]


@dataclass
class AngleDeviation:
    angle_name: str
    dev: np.ndarray  # >= 0, 0 inside the band
    above: np.ndarray  # signed split of dev, used for direction
    below: np.ndarray
    mean_dev: float
    max_dev: float
    worst_phase_span: tuple[float, float] | None

    @property
    def direction(self) -> Direction:
        return "above" if float(self.above.sum()) >= float(self.below.sum()) else "below"


@dataclass
class StrokeScore:
    features: StrokeFeatures
    deviations: dict[str, AngleDeviation]
    mean_dev: float
    accuracy: float | None
    skipped_angles: list[str] = field(default_factory=list)


@dataclass
class Fault:
    angle_name: str
    stroke_class: StrokeClass
    severity: float
    worst_phase_span: tuple[float, float] | None
    direction: Direction
    stroke_count: int
    max_dev: float


@dataclass
class PlayAccuracy:
    stroke_accuracies: list[float]
    session_accuracy: float | None
    per_class: dict[StrokeClass, float]


# --- court ---


@dataclass(frozen=True)
class CourtGeometry:
    length: float = 13.40
    width: float = 6.10

    @property
    def net_y(self) -> float:
        return self.length / 2


@dataclass(frozen=True)
class ZoneGrid:
    rows: int = 3
    cols: int = 3

    @property
    def zone_count(self) -> int:
        return 2 * self.rows * self.cols


@dataclass
class LandingHeatmap:
    grid: np.ndarray  # (H, W), row along court length, column across
    resolution: float
    origin_zone: int
    stroke_class: StrokeClass
    normalized: bool = False
    count: int = 0


@dataclass
class LandingObservation:
    stroke_class: StrokeClass
    origin: tuple[float, float] | None
    landing: tuple[float, float] | None


# --- shuttlesim ---


@dataclass(frozen=True)
class ShuttleState:
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]


@dataclass(frozen=True)
class DragParams:
    terminal_velocity: float = 6.7
    g: float = 9.81


@dataclass
class InjectedFault:
    angle_name: str
    stroke_class: StrokeClass
    phase_span: tuple[float, float]
    offset_deg: float


# --- report ---


@dataclass
class HeatmapRef:
    origin_zone: int
    stroke_class: StrokeClass
    path: str
    most_probable_zone: int
    count: int


@dataclass
class StrokeRow:
    view_id: str
    start_frame: int
    peak_frame: int
    end_frame: int
    stroke_class: StrokeClass
    accuracy: float | None
    mean_dev: float


@dataclass
class SwingSummary:
    stroke_class: StrokeClass
    count: int
    mean_head_speed: float
    mean_force: float
    mean_radian: float
    total_calories: float


@dataclass
class AssessmentReport:
    session_id: str
    subject_id: str
    overall_accuracy: float | None
    per_class_accuracy: dict[StrokeClass, float]
    faults: list[Fault]
    top_k: int
    strokes: list[StrokeRow] = field(default_factory=list)
    swing: list[SwingSummary] = field(default_factory=list)
    heatmaps: list[HeatmapRef] = field(default_factory=list)
    validation_warnings: list[str] = field(default_factory=list)
    unscored: list[str] = field(default_factory=list)
    recorded_at: str | None = None
    config: dict = field(default_factory=dict)

    @property
    def top_faults(self) -> list[Fault]:
        return self.faults[: self.top_k]


@dataclass
class ProgressEntry:
    session_id: str
    timestamp: str
    overall_accuracy: float | None
    per_class_accuracy: dict[StrokeClass, float] = field(default_factory=dict)


@dataclass
class ProgressTrack:
    entries: list[ProgressEntry] = field(default_factory=list)


@dataclass
class ProgressSummary:
    entries: list[ProgressEntry]
    deltas: list[float]
    per_class_deltas: dict[StrokeClass, list[float]]
    best_session: str
    monotonic: bool
