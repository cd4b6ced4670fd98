"""Synthetic sessions with known ground truth.

Each stroke animates a BODY-25 skeleton from per-class joint-angle profiles,
launches a shuttle through the drag integrator at contact and records what
was generated in a `truth.json` sidecar next to the session manifest.
Skeleton geometry is built in torso units (Neck-MidHip = 1, image y down) so
the tracked 2-D angles equal their generating curves.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from shuttlesense.config import SimConfig
from shuttlesense.errors import BadSpec
from shuttlesense.io import read_json, write_imu, write_json, write_pose_frame, write_trajectory
from shuttlesense.shuttlesim import sample_flight
from shuttlesense.types import (
    NUM_KEYPOINTS,
    DragParams,
    Handedness,
    ImuTrace,
    InjectedFault,
    Role,
    ShuttleState,
    SkeletonFrame,
    StrokeClass,
    TrajectorySpace,
    TrajectoryTrack,
)

log = structlog.get_logger()

VIEW_ID = "cam0"
PIXEL_ORIGIN = (640.0, 520.0)
TORSO_PX = 150.0
TORSO_M = 0.5
IMU_RATE_HZ = 100.0
GRAVITY = 9.81

LEAD_IN_S = 0.3
HOLD_S = 0.2
TAIL_S = 0.5
RECOVERY_S = 1.2

UPPER_ARM = 0.6
FOREARM = 0.55
THIGH = 0.9
SHANK = 0.85

ANGLE_LIMITS = (1.0, 179.0)
MIN_STROKE_FRAMES = 5


@dataclass(frozen=True)
class AngleProfile:
    """start -> end with a raised-cosine ease, plus an optional mid-stroke bump."""

    start: float
    end: float
    bump: float = 0.0

    def at(self, phase: np.ndarray | float) -> np.ndarray:
        phase = np.asarray(phase, dtype=float)
        ease = (1.0 - np.cos(np.pi * phase)) / 2.0
        return self.start + (self.end - self.start) * ease + self.bump * np.sin(np.pi * phase) ** 2


@dataclass(frozen=True)
class ClassProfile:
    overhead: bool
    peak_speed: float  # racket-wrist target, torso-lengths / s
    elevation_deg: float
    launch_speed: float  # m/s
    contact_height: float  # m
    angles: dict[str, AngleProfile]


def _profile(overhead, peak_speed, elevation, launch_speed, height, **angles) -> ClassProfile:
    return ClassProfile(
        overhead=overhead,
        peak_speed=peak_speed,
        elevation_deg=elevation,
        launch_speed=launch_speed,
        contact_height=height,
        angles={name: AngleProfile(*values) for name, values in angles.items()},
    )


# Angle names are for a right-handed player; left-handed sessions swap sides.
CANONICAL_PROFILES: dict[StrokeClass, ClassProfile] = {
    StrokeClass.SMASH: _profile(
        True, 9.0, -24.0, 40.0, 2.8,
        RShoulder=(120, 165), RElbow=(70, 175), LShoulder=(45, 35), LElbow=(100, 130),
        RKnee=(150, 170), LKnee=(155, 165), RHip=(165, 172), LHip=(168, 170),
    ),
    StrokeClass.CLEAR: _profile(
        True, 7.0, 50.0, 22.0, 2.5,
        RShoulder=(125, 165), RElbow=(80, 170), LShoulder=(40, 35), LElbow=(110, 130),
        RKnee=(155, 170), LKnee=(160, 165), RHip=(168, 172), LHip=(168, 171),
    ),
    StrokeClass.SLICE: _profile(
        True, 4.8, -30.0, 18.0, 2.6,
        RShoulder=(125, 160), RElbow=(90, 160), LShoulder=(40, 38), LElbow=(110, 125),
        RKnee=(155, 168), LKnee=(160, 165), RHip=(168, 172), LHip=(168, 170),
    ),
    StrokeClass.LIFT: _profile(
        False, 5.0, 55.0, 18.0, 0.8,
        RShoulder=(25, 80), RElbow=(120, 160), LShoulder=(30, 40), LElbow=(120, 140),
        RKnee=(120, 150), LKnee=(150, 160), RHip=(140, 160), LHip=(160, 165),
    ),
    StrokeClass.DRIVE: _profile(
        False, 5.0, 0.0, 20.0, 1.4,
        RShoulder=(40, 100), RElbow=(90, 170), LShoulder=(35, 40), LElbow=(110, 120),
        RKnee=(150, 160), LKnee=(155, 160), RHip=(165, 168), LHip=(165, 168),
    ),
    StrokeClass.BLOCK: _profile(
        False, 2.0, -5.0, 6.0, 1.0,
        RShoulder=(50, 60), RElbow=(120, 140), LShoulder=(35, 38), LElbow=(115, 120),
        RKnee=(145, 150), LKnee=(150, 155), RHip=(160, 163), LHip=(162, 164),
    ),
}

DEFAULT_MIX = {
    StrokeClass.SMASH: 0.2,
    StrokeClass.CLEAR: 0.2,
    StrokeClass.SLICE: 0.2,
    StrokeClass.LIFT: 0.2,
    StrokeClass.DRIVE: 0.2,
}


@dataclass
class FixtureSpec:
    seed: int = 0
    class_mix: dict[StrokeClass, float] = field(default_factory=lambda: dict(DEFAULT_MIX))
    strokes_per_class: int = 4
    injected_faults: list[InjectedFault] = field(default_factory=list)
    landing_sigma: float = 0.3
    fps: float = 30.0
    jitter_deg: float = 1.0
    pixel_noise: float = 0.0
    dropout_rate: float = 0.0
    handedness: Handedness = Handedness.RIGHT
    role: Role = Role.TRAINEE
    session_id: str = "fixture"
    subject_id: str = "synthetic"
    recorded_at: str | None = None
    emit_imu: bool = True

    def validate(self) -> None:
        if not self.class_mix:
            raise BadSpec("class_mix must name at least one stroke class")
        if any(p < 0 for p in self.class_mix.values()):
            raise BadSpec("class_mix probabilities must be >= 0")
        if abs(sum(self.class_mix.values()) - 1.0) > 1e-9:
            raise BadSpec(f"class_mix probabilities sum to {sum(self.class_mix.values())}, expected 1")
        if self.strokes_per_class < 0:
            raise BadSpec("strokes_per_class must be >= 0")
        if not self.fps > 0:
            raise BadSpec("fps must be > 0")
        if self.landing_sigma < 0 or self.jitter_deg < 0 or self.pixel_noise < 0:
            raise BadSpec("landing_sigma, jitter_deg and pixel_noise must be >= 0")
        if not 0 <= self.dropout_rate < 1:
            raise BadSpec("dropout_rate must be in [0, 1)")
        for fault in self.injected_faults:
            lo, hi = fault.phase_span
            if not 0 <= lo <= hi <= 1:
                raise BadSpec(f"fault {fault.angle_name}/{fault.stroke_class}: phase span must lie in [0, 1]")
            if not math.isfinite(fault.offset_deg):
                raise BadSpec(f"fault {fault.angle_name}/{fault.stroke_class}: offset must be finite")
            if fault.angle_name not in CANONICAL_PROFILES[fault.stroke_class].angles:
                raise BadSpec(f"fault names unknown angle {fault.angle_name}")

    def class_counts(self) -> dict[StrokeClass, int]:
        n = len(self.class_mix)
        return {cls: int(round(p * self.strokes_per_class * n)) for cls, p in self.class_mix.items()}


def fixture_spec_from_dict(data: dict[str, Any]) -> FixtureSpec:
    known = {f.name for f in dataclasses.fields(FixtureSpec)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise BadSpec(f"unknown fixture spec key: {unknown[0]}")
    try:
        values = dict(data)
        if "class_mix" in values:
            values["class_mix"] = {StrokeClass(k): float(v) for k, v in values["class_mix"].items()}
        if "injected_faults" in values:
            values["injected_faults"] = [
                InjectedFault(
                    angle_name=str(f["angle_name"]),
                    stroke_class=StrokeClass(f["stroke_class"]),
                    phase_span=(float(f["phase_span"][0]), float(f["phase_span"][1])),
                    offset_deg=float(f["offset_deg"]),
                )
                for f in values["injected_faults"]
            ]
        if "handedness" in values:
            values["handedness"] = Handedness(values["handedness"])
        if "role" in values:
            values["role"] = Role(values["role"])
        spec = FixtureSpec(**values)
    except (KeyError, TypeError, ValueError) as e:
        raise BadSpec(f"invalid fixture spec: {e}") from e
    spec.validate()
    return spec


def load_fixture_spec(path: str | Path) -> FixtureSpec:
    data = read_json(path)
    if not isinstance(data, dict):
        raise BadSpec(f"fixture spec {path} must hold a JSON object")
    return fixture_spec_from_dict(data)


# --- skeleton geometry ---


def _rotate(v: np.ndarray, degrees: float) -> np.ndarray:
    a = math.radians(degrees)
    c, s = math.cos(a), math.sin(a)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.hypot(v[0], v[1])


def _arm(shoulder_deg: float, elbow_deg: float, raised: bool) -> tuple[np.ndarray, np.ndarray]:
    """Elbow and wrist relative to a shoulder whose neck ray points along +x."""
    t = math.radians(shoulder_deg)
    upper = np.array([math.cos(t), -math.sin(t) if raised else math.sin(t)])
    elbow = UPPER_ARM * upper
    wrist = elbow + FOREARM * _rotate(-upper, -elbow_deg)
    return elbow, wrist


def _leg(hip: np.ndarray, neck: np.ndarray, hip_deg: float, knee_deg: float) -> tuple[np.ndarray, np.ndarray]:
    thigh = _rotate(_unit(neck - hip), -hip_deg)
    knee = hip + THIGH * thigh
    ankle = knee + SHANK * _rotate(-thigh, knee_deg)
    return knee, ankle


def _mirror(v: np.ndarray) -> np.ndarray:
    return np.array([-v[0], v[1]])


def skeleton_pose(angles: dict[str, float], racket_raised: bool, handedness: Handedness) -> np.ndarray:
    """(25, 2) keypoints in torso units: MidHip at the origin, Neck at (0, -1)."""
    xy = np.zeros((NUM_KEYPOINTS, 2))
    neck = np.array([0.0, -1.0])
    xy[1] = neck
    xy[8] = (0.0, 0.0)
    xy[0] = (0.0, -1.35)
    xy[15], xy[16] = (-0.06, -1.42), (0.06, -1.42)
    xy[17], xy[18] = (-0.12, -1.38), (0.12, -1.38)

    right_raised = racket_raised and handedness == Handedness.RIGHT
    left_raised = racket_raised and handedness == Handedness.LEFT

    r_shoulder = np.array([-0.4, -1.0])
    elbow, wrist = _arm(angles["RShoulder"], angles["RElbow"], right_raised)
    xy[2], xy[3], xy[4] = r_shoulder, r_shoulder + elbow, r_shoulder + wrist

    l_shoulder = np.array([0.4, -1.0])
    elbow, wrist = _arm(angles["LShoulder"], angles["LElbow"], left_raised)
    xy[5], xy[6], xy[7] = l_shoulder, l_shoulder + _mirror(elbow), l_shoulder + _mirror(wrist)

    r_hip = np.array([-0.2, 0.0])
    knee, ankle = _leg(r_hip, neck, angles["RHip"], angles["RKnee"])
    xy[9], xy[10], xy[11] = r_hip, knee, ankle

    l_hip = np.array([0.2, 0.0])
    knee, ankle = _leg(_mirror(l_hip), neck, angles["LHip"], angles["LKnee"])
    xy[12], xy[13], xy[14] = l_hip, _mirror(knee), _mirror(ankle)

    for toe, small, heel, ankle_i, side in ((22, 23, 24, 11, -1.0), (19, 20, 21, 14, 1.0)):
        a = xy[ankle_i]
        xy[toe] = a + (side * 0.12, 0.06)
        xy[small] = a + (side * 0.18, 0.05)
        xy[heel] = a + (-side * 0.03, 0.05)
    return xy


# --- strokes ---


_SIDE_SWAP = {"R": "L", "L": "R"}


def _actual_name(name: str, handedness: Handedness) -> str:
    if handedness == Handedness.RIGHT:
        return name
    return _SIDE_SWAP.get(name[0], name[0]) + name[1:]


def _angles_at(profiles: dict[str, AngleProfile], phase: np.ndarray, handedness: Handedness) -> dict[str, np.ndarray]:
    return {_actual_name(name, handedness): p.at(phase) for name, p in profiles.items()}


def _poses(angles: dict[str, np.ndarray], raised: bool, handedness: Handedness) -> list[np.ndarray]:
    n = len(next(iter(angles.values())))
    return [skeleton_pose({k: float(v[i]) for k, v in angles.items()}, raised, handedness) for i in range(n)]


def _racket_wrist_index(handedness: Handedness) -> int:
    return 4 if handedness == Handedness.RIGHT else 7


def sampled_peak_speed(
    profile: ClassProfile,
    angles: dict[str, AngleProfile],
    handedness: Handedness,
    n_frames: int,
    fps: float,
) -> float:
    """Racket-wrist peak over `n_frames` as central differences see it, with the end poses held."""
    phase = np.arange(n_frames) / (n_frames - 1)
    poses = _poses(_angles_at(angles, phase, handedness), profile.overhead, handedness)
    wrist = np.array([p[_racket_wrist_index(handedness)] for p in poses])
    held = np.vstack([wrist[:1], wrist, wrist[-1:]])
    step = np.hypot(*(held[2:] - held[:-2]).T)
    return float(step.max()) * fps / 2.0


def stroke_frames(
    profile: ClassProfile,
    angles: dict[str, AngleProfile],
    handedness: Handedness,
    fps: float,
) -> int:
    """Frame count whose sampled racket-wrist peak lies nearest the class's target speed."""
    best_n, best_err = MIN_STROKE_FRAMES, math.inf
    for n in range(MIN_STROKE_FRAMES, max(MIN_STROKE_FRAMES, int(4 * fps)) + 1):
        peak = sampled_peak_speed(profile, angles, handedness, n, fps)
        if peak <= 0:
            break
        err = abs(math.log(peak / profile.peak_speed))
        if err < best_err:
            best_n, best_err = n, err
        # the sampled peak only falls as the stroke gets longer
        if peak < profile.peak_speed:
            break
    return best_n


@dataclass
class _StrokePlan:
    stroke_class: StrokeClass
    poses: list[np.ndarray]
    peak_offset: int
    launch: ShuttleState
    landing_offset: np.ndarray


def _plan_stroke(
    stroke_class: StrokeClass,
    spec: FixtureSpec,
    rng: np.random.Generator,
    faults: list[InjectedFault],
) -> _StrokePlan:
    profile = CANONICAL_PROFILES[stroke_class]
    names = sorted(profile.angles)
    jitter = rng.normal(0.0, spec.jitter_deg, size=(len(names), 2)) if spec.jitter_deg > 0 else np.zeros((len(names), 2))
    jittered = {}
    for i, name in enumerate(names):
        p = profile.angles[name]
        jittered[name] = AngleProfile(p.start + jitter[i, 0], p.end + jitter[i, 1], p.bump)

    # frame count comes from the unfaulted profile
    n = stroke_frames(profile, jittered, spec.handedness, spec.fps)
    phase = np.arange(n) / (n - 1)

    clean = _angles_at(jittered, phase, spec.handedness)
    clean_poses = _poses(clean, profile.overhead, spec.handedness)
    wrist = np.array([p[_racket_wrist_index(spec.handedness)] for p in clean_poses])
    speed = np.hypot(*np.gradient(wrist, axis=0).T)
    peak_offset = int(np.argmax(speed))

    angles = {k: v.copy() for k, v in clean.items()}
    for fault in faults:
        in_span = (phase >= fault.phase_span[0]) & (phase <= fault.phase_span[1])
        angles[fault.angle_name][in_span] += fault.offset_deg
    for k in angles:
        angles[k] = np.clip(angles[k], *ANGLE_LIMITS)
    poses = _poses(angles, profile.overhead, spec.handedness) if faults else clean_poses

    origin = np.array([3.05, 1.5]) + rng.normal(0.0, 0.3, size=2)
    elevation = math.radians(profile.elevation_deg)
    launch = ShuttleState(
        position=(float(origin[0]), float(origin[1]), profile.contact_height),
        velocity=(0.0, profile.launch_speed * math.cos(elevation), profile.launch_speed * math.sin(elevation)),
    )
    landing_offset = rng.normal(0.0, spec.landing_sigma, size=2) if spec.landing_sigma > 0 else np.zeros(2)
    return _StrokePlan(stroke_class, poses, peak_offset, launch, landing_offset)


def _interleave(counts: dict[StrokeClass, int]) -> list[StrokeClass]:
    remaining = dict(counts)
    order: list[StrokeClass] = []
    while any(remaining.values()):
        for cls in counts:
            if remaining[cls] > 0:
                order.append(cls)
                remaining[cls] -= 1
    return order


@dataclass
class FixtureSession:
    directory: Path
    manifest_path: Path
    truth_path: Path
    truth: dict[str, Any]


def generate_fixture_session(
    spec: FixtureSpec,
    out_dir: str | Path,
    sim: SimConfig | None = None,
) -> FixtureSession:
    """Write a deterministic synthetic session for `spec` under `out_dir`."""
    spec.validate()
    out_dir = Path(out_dir)
    fps = spec.fps
    order = _interleave(spec.class_counts())
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(len(order) + 1)]
    sim = sim or SimConfig()
    params = DragParams(terminal_velocity=sim.terminal_velocity, g=sim.g)

    poses: list[np.ndarray] = []

    def hold(pose: np.ndarray, seconds: float) -> None:
        poses.extend(pose for _ in range(max(1, int(round(seconds * fps)))))

    def transition(a: np.ndarray, b: np.ndarray, seconds: float) -> None:
        n = max(1, int(round(seconds * fps)))
        for k in range(1, n + 1):
            w = (1.0 - math.cos(math.pi * k / n)) / 2.0
            poses.append(a + (b - a) * w)

    flights: list[tuple[int, list[tuple[float, float, float]]]] = []
    truth_strokes: list[dict[str, Any]] = []

    if not order:
        neutral = CANONICAL_PROFILES[StrokeClass.DRIVE]
        start = skeleton_pose(
            {_actual_name(k, spec.handedness): p.start for k, p in neutral.angles.items()},
            neutral.overhead,
            spec.handedness,
        )
        hold(start, LEAD_IN_S + TAIL_S)

    for i, stroke_class in enumerate(order):
        faults = [f for f in spec.injected_faults if f.stroke_class == stroke_class]
        plan = _plan_stroke(stroke_class, spec, streams[i], faults)
        if i == 0:
            hold(plan.poses[0], LEAD_IN_S)
        else:
            transition(poses[-1], plan.poses[0], RECOVERY_S)
            hold(plan.poses[0], HOLD_S)

        start = len(poses)
        poses.extend(plan.poses)
        end = len(poses) - 1
        contact = start + plan.peak_offset

        samples, landing, flight_time = sample_flight(plan.launch, 1.0 / fps, params, sim.dt, sim.t_max)
        offset = plan.landing_offset
        blended = [
            (x + offset[0] * min(1.0, k / fps / flight_time), y + offset[1] * min(1.0, k / fps / flight_time), z)
            for k, (x, y, z) in enumerate(samples)
        ]
        landing_xy = (landing[0] + offset[0], landing[1] + offset[1])
        blended.append((landing_xy[0], landing_xy[1], 0.0))
        flights.append((contact, blended))
        landing_frame = contact + len(blended) - 1

        tail = max(int(round(TAIL_S * fps)), landing_frame - end + 1)
        poses.extend(poses[-1] for _ in range(tail))

        truth_strokes.append(
            {
                "stroke_class": stroke_class.value,
                "start_frame": start,
                "peak_frame": contact,
                "end_frame": end,
                "landing_frame": landing_frame,
                "origin": [blended[0][0], blended[0][1]],
                "landing": list(landing_xy),
                "faulted": bool(faults),
            }
        )

    noise_rng = streams[-1]
    pose_dir = out_dir / "pose" / VIEW_ID
    frames: list[SkeletonFrame] = []
    for index, pose in enumerate(poses):
        xy = np.array(PIXEL_ORIGIN) + TORSO_PX * pose
        if spec.pixel_noise > 0:
            xy = xy + noise_rng.normal(0.0, spec.pixel_noise, size=xy.shape)
        present = np.ones(NUM_KEYPOINTS, dtype=bool)
        if spec.dropout_rate > 0:
            present = noise_rng.random(NUM_KEYPOINTS) >= spec.dropout_rate
        frame = SkeletonFrame(
            frame_index=index,
            view_id=VIEW_ID,
            xy=xy,
            present=present,
            confidence=np.where(present, 0.9, 0.0),
        )
        frames.append(frame)
        write_pose_frame(frame, pose_dir, prefix=spec.session_id)

    write_trajectory(_track(len(poses), flights), out_dir / f"trajectory_{VIEW_ID}.csv")
    view: dict[str, Any] = {
        "view_id": VIEW_ID,
        "camera_angle_deg": 0.0,
        "pose_dir": f"pose/{VIEW_ID}",
        "trajectory_path": f"trajectory_{VIEW_ID}.csv",
        "trajectory_space": TrajectorySpace.COURT.value,
        "imu_offset_s": 0.0,
    }
    if spec.emit_imu:
        write_imu(_imu_trace(poses, fps, spec.handedness), out_dir / f"imu_{VIEW_ID}.csv")
        view["imu_path"] = f"imu_{VIEW_ID}.csv"

    manifest: dict[str, Any] = {
        "session_id": spec.session_id,
        "subject_id": spec.subject_id,
        "role": spec.role.value,
        "fps": fps,
        "handedness": spec.handedness.value,
        "views": [view],
    }
    if spec.recorded_at is not None:
        manifest["recorded_at"] = spec.recorded_at
    manifest_path = out_dir / "manifest.json"
    write_json(manifest, manifest_path)

    truth = {
        "session_id": spec.session_id,
        "seed": spec.seed,
        "fps": fps,
        "frames": len(poses),
        "strokes": truth_strokes,
        "injected_faults": [
            {
                "angle_name": f.angle_name,
                "stroke_class": f.stroke_class.value,
                "phase_span": list(f.phase_span),
                "offset_deg": f.offset_deg,
            }
            for f in spec.injected_faults
        ],
    }
    truth_path = out_dir / "truth.json"
    write_json(truth, truth_path)
    log.info("fixture_generated", session_id=spec.session_id, strokes=len(order), frames=len(poses), out=str(out_dir))
    return FixtureSession(directory=out_dir, manifest_path=manifest_path, truth_path=truth_path, truth=truth)


def _track(n_frames: int, flights: list[tuple[int, list[tuple[float, float, float]]]]) -> TrajectoryTrack:
    visible = np.zeros(n_frames, dtype=bool)
    x, y, z = np.zeros(n_frames), np.zeros(n_frames), np.zeros(n_frames)
    for contact, samples in flights:
        for k, (px, py, pz) in enumerate(samples):
            f = contact + k
            if f >= n_frames:
                break
            visible[f] = True
            x[f], y[f], z[f] = px, py, pz
    return TrajectoryTrack(
        frames=np.arange(n_frames),
        visible=visible,
        x=x,
        y=y,
        space=TrajectorySpace.COURT,
        z=z,
    )


def _imu_trace(poses: list[np.ndarray], fps: float, handedness: Handedness) -> ImuTrace:
    """Racket-arm IMU: forearm angular rate on gz, wrist acceleration on ax/ay, gravity on az."""
    wrist_i = _racket_wrist_index(handedness)
    elbow_i = wrist_i - 1
    stack = np.stack(poses)
    frame_t = np.arange(len(poses)) / fps

    forearm = stack[:, wrist_i] - stack[:, elbow_i]
    heading = np.unwrap(np.arctan2(forearm[:, 1], forearm[:, 0]))
    wrist_m = stack[:, wrist_i] * TORSO_M
    if len(poses) > 1:
        rate = np.gradient(heading, frame_t)
        accel = np.gradient(np.gradient(wrist_m, frame_t, axis=0), frame_t, axis=0)
    else:
        rate = np.zeros(len(poses))
        accel = np.zeros((len(poses), 2))

    t = np.arange(int(math.floor(frame_t[-1] * IMU_RATE_HZ)) + 1) / IMU_RATE_HZ
    zeros = np.zeros(len(t))
    return ImuTrace(
        t=t,
        accel=np.column_stack([np.interp(t, frame_t, accel[:, 0]), np.interp(t, frame_t, accel[:, 1]),
                               np.full(len(t), GRAVITY)]),
        gyro=np.column_stack([zeros, zeros, np.interp(t, frame_t, rate)]),
    )
