"""Tests for the ingest module (manifests, pose frames, tracks, IMU, validation)."""

import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shuttlesense.config import AnalysisConfig
from shuttlesense.errors import (
    BadKeypointCount,
    EmptySession,
    MalformedFile,
    MalformedRow,
    ManifestError,
    NonMonotoneFrames,
    UsageError,
)
from shuttlesense.ingest import (
    load_manifest,
    manifest_from_dict,
    manifest_to_dict,
    parse_imu,
    parse_pose_file,
    parse_pose_frames,
    parse_trajectory,
    to_court_space,
    validate_session,
)
from shuttlesense.types import (
    NUM_KEYPOINTS,
    Handedness,
    ImuTrace,
    Role,
    SkeletonFrame,
    TrajectorySpace,
)


def make_keypoints(scale: float = 1.0, confidence: float = 0.9) -> list[float]:
    values = []
    for i in range(NUM_KEYPOINTS):
        values += [100.0 + scale * i, 200.0 + scale * 2 * i, confidence]
    return values


def write_frame(directory: Path, index: int, people: list[list[float]], prefix: str = "clip") -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{prefix}_{index:012d}_keypoints.json"
    path.write_text(json.dumps({"version": 1.3, "people": [{"pose_keypoints_2d": p} for p in people]}))
    return path


def make_manifest_dict(**overrides) -> dict:
    data = {
        "session_id": "s1",
        "subject_id": "p1",
        "role": "trainee",
        "fps": 30,
        "views": [{"view_id": "cam0", "camera_angle_deg": 0, "pose_dir": "pose/cam0"}],
    }
    data.update(overrides)
    return data


def make_frames(n: int, view_id: str = "cam0", present: bool = True) -> list[SkeletonFrame]:
    frames = []
    for i in range(n):
        frame = SkeletonFrame.empty(i, view_id)
        frame.present[:] = present
        frames.append(frame)
    return frames


class TestManifest:
    def test_relative_paths_resolve_against_manifest_dir(self, tmp_path: Path):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(make_manifest_dict()))

        manifest = load_manifest(path)

        assert manifest.views[0].pose_dir == tmp_path / "pose/cam0"
        assert manifest.role == Role.TRAINEE
        assert manifest.handedness == Handedness.RIGHT
        assert manifest.source_path == path

    def test_defaults(self):
        manifest = manifest_from_dict(make_manifest_dict())
        view = manifest.views[0]

        assert view.trajectory_path is None
        assert view.imu_path is None
        assert view.imu_offset_s == 0.0
        assert view.trajectory_space == TrajectorySpace.COURT
        assert view.homography is None

    def test_missing_key(self):
        data = make_manifest_dict()
        del data["fps"]

        with pytest.raises(ManifestError, match="fps"):
            manifest_from_dict(data)

    def test_too_many_views(self):
        views = [{"view_id": f"c{i}", "camera_angle_deg": 30 * i, "pose_dir": "p"} for i in range(4)]

        with pytest.raises(ManifestError, match="1 to 3 views"):
            manifest_from_dict(make_manifest_dict(views=views))

    def test_duplicate_camera_angles(self):
        views = [
            {"view_id": "a", "camera_angle_deg": 0, "pose_dir": "p"},
            {"view_id": "b", "camera_angle_deg": 360, "pose_dir": "q"},
        ]

        with pytest.raises(ManifestError, match="distinct"):
            manifest_from_dict(make_manifest_dict(views=views))

    def test_bad_homography(self):
        views = [{"view_id": "a", "camera_angle_deg": 0, "pose_dir": "p", "homography": [[1, 0], [0, 1]]}]

        with pytest.raises(ManifestError, match="3x3"):
            manifest_from_dict(make_manifest_dict(views=views))

    def test_unknown_role(self):
        with pytest.raises(ManifestError):
            manifest_from_dict(make_manifest_dict(role="coach"))

    def test_to_dict_keeps_relative_paths(self, tmp_path: Path):
        data = make_manifest_dict(recorded_at="2026-01-05T10:00:00")
        manifest = manifest_from_dict(data, base_dir=tmp_path)

        out = manifest_to_dict(manifest, base_dir=tmp_path)

        assert out["views"][0]["pose_dir"] == "pose/cam0"
        assert out["recorded_at"] == "2026-01-05T10:00:00"

    def test_malformed_json(self, tmp_path: Path):
        path = tmp_path / "manifest.json"
        path.write_text("{")

        with pytest.raises(MalformedFile):
            load_manifest(path)

    @pytest.mark.parametrize(("key", "what"), [("trajectory_path", "trajectory"), ("imu_path", "IMU")])
    def test_missing_view_file(self, tmp_path: Path, key, what):
        data = make_manifest_dict()
        data["views"][0][key] = "missing.csv"
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(data))

        with pytest.raises(UsageError, match=f"{what} file not found"):
            load_manifest(path)

    def test_missing_manifest(self, tmp_path: Path):
        with pytest.raises(UsageError, match="manifest not found"):
            load_manifest(tmp_path / "manifest.json")


class TestParsePoseFile:
    def test_single_person(self, tmp_path: Path):
        path = write_frame(tmp_path, 0, [make_keypoints()])

        frame = parse_pose_file(path, 0, view_id="cam0")

        assert frame.xy.shape == (NUM_KEYPOINTS, 2)
        assert frame.present.all()
        assert frame.xy[1].tolist() == [101.0, 202.0]

    def test_no_person_gives_empty_frame(self, tmp_path: Path):
        path = write_frame(tmp_path, 3, [])

        frame = parse_pose_file(path, 3)

        assert frame.frame_index == 3
        assert not frame.present.any()

    def test_largest_person_selected(self, tmp_path: Path):
        path = write_frame(tmp_path, 0, [make_keypoints(scale=1.0), make_keypoints(scale=5.0)])

        frame = parse_pose_file(path, 0)

        assert frame.xy[24, 0] == 100.0 + 5.0 * 24

    def test_confidence_floor(self, tmp_path: Path):
        kp = make_keypoints()
        kp[3 * 4 + 2] = 0.05  # RWrist
        kp[3 * 7 + 2] = 0.0  # LWrist
        path = write_frame(tmp_path, 0, [kp])

        frame = parse_pose_file(path, 0, confidence_floor=0.1)

        assert not frame.present[4]
        assert not frame.present[7]
        assert frame.present[3]

    def test_zero_floor_keeps_low_but_not_zero_confidence(self, tmp_path: Path):
        kp = make_keypoints()
        kp[3 * 4 + 2] = 0.05
        kp[3 * 7 + 2] = 0.0
        path = write_frame(tmp_path, 0, [kp])

        frame = parse_pose_file(path, 0, confidence_floor=0.0)

        assert frame.present[4]
        assert not frame.present[7]

    def test_bad_keypoint_count(self, tmp_path: Path):
        path = write_frame(tmp_path, 0, [make_keypoints()[:-3]])

        with pytest.raises(BadKeypointCount) as exc:
            parse_pose_file(path, 0)
        assert exc.value.count == 72

    def test_missing_people_key(self, tmp_path: Path):
        path = tmp_path / "clip_000000000000_keypoints.json"
        path.write_text(json.dumps({"version": 1.3}))

        with pytest.raises(MalformedFile):
            parse_pose_file(path, 0)


class TestParsePoseFrames:
    def test_ordered_by_index(self, tmp_path: Path):
        for i in (2, 0, 1, 10):
            write_frame(tmp_path, i, [make_keypoints()])

        frames = parse_pose_frames(tmp_path, view_id="cam0")

        assert [f.frame_index for f in frames] == [0, 1, 2, 10]
        assert all(f.view_id == "cam0" for f in frames)

    def test_empty_directory(self, tmp_path: Path):
        with pytest.raises(EmptySession):
            parse_pose_frames(tmp_path)

    def test_missing_directory(self, tmp_path: Path):
        with pytest.raises(EmptySession):
            parse_pose_frames(tmp_path / "nope")

    def test_duplicate_index(self, tmp_path: Path):
        write_frame(tmp_path, 4, [make_keypoints()], prefix="a")
        write_frame(tmp_path, 4, [make_keypoints()], prefix="b")

        with pytest.raises(MalformedFile, match="duplicate"):
            parse_pose_frames(tmp_path)

    def test_invalid_floor(self, tmp_path: Path):
        with pytest.raises(ValueError):
            parse_pose_frames(tmp_path, confidence_floor=1.5)

    @settings(max_examples=25, deadline=None)
    @given(st.permutations(range(6)))
    def test_enumeration_order_does_not_matter(self, tmp_path_factory, order):
        directory = tmp_path_factory.mktemp("pose")
        for i in (3, 0, 5, 1, 4, 2):
            write_frame(directory, i, [make_keypoints(scale=1.0 + i)])
        real_glob = type(directory).glob

        def shuffled_glob(self, pattern):
            found = sorted(real_glob(self, pattern))
            return iter([found[i] for i in order])

        expected = parse_pose_frames(directory)
        with patch.object(type(directory), "glob", shuffled_glob):
            frames = parse_pose_frames(directory)

        assert [f.frame_index for f in frames] == list(range(6))
        for got, want in zip(frames, expected):
            np.testing.assert_array_equal(got.xy, want.xy)


class TestParseTrajectory:
    def test_basic(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y\n0,1,100,200\n1,0,5,5\n2,1,110.5,190\n")

        track = parse_trajectory(path, TrajectorySpace.PIXEL)

        assert track.frames.tolist() == [0, 1, 2]
        assert track.visible.tolist() == [True, False, True]
        assert track.x.tolist() == [100.0, 0.0, 110.5]
        assert track.z is None
        assert track.space == TrajectorySpace.PIXEL

    def test_height_column(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y,Z\n0,1,3.0,1.5,2.4\n1,1,3.0,2.5,2.6\n")

        track = parse_trajectory(path)

        assert track.z.tolist() == [2.4, 2.6]

    def test_non_monotone(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y\n0,1,1,1\n2,1,1,1\n2,1,1,1\n")

        with pytest.raises(NonMonotoneFrames) as exc:
            parse_trajectory(path)
        assert exc.value.line_no == 4

    def test_bad_visibility(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y\n0,2,1,1\n")

        with pytest.raises(MalformedRow) as exc:
            parse_trajectory(path)
        assert exc.value.line_no == 2

    def test_unparsable_row(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y\n0,1,abc,1\n")

        with pytest.raises(MalformedRow):
            parse_trajectory(path)

    def test_wrong_header(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("frame,vis,x,y\n0,1,1,1\n")

        with pytest.raises(MalformedRow, match="header"):
            parse_trajectory(path)


class TestToCourtSpace:
    def test_court_track_passes_through(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y\n0,1,1,2\n")
        track = parse_trajectory(path)

        assert to_court_space(track, None) is track

    def test_homography_scales(self, tmp_path: Path):
        path = tmp_path / "track.csv"
        path.write_text("Frame,Visibility,X,Y\n0,1,100,200\n1,0,0,0\n")
        track = parse_trajectory(path, TrajectorySpace.PIXEL)

        court = to_court_space(track, [[0.01, 0, 0], [0, 0.02, 0], [0, 0, 1]])

        assert court.space == TrajectorySpace.COURT
        assert court.x[0] == pytest.approx(1.0)
        assert court.y[0] == pytest.approx(4.0)
        assert court.x[1] == 0.0


class TestParseImu:
    def test_basic(self, tmp_path: Path):
        path = tmp_path / "imu.csv"
        path.write_text("t,ax,ay,az,gx,gy,gz\n0.00,0,0,9.81,0,0,1\n0.01,1,0,9.81,0,0,2\n")

        trace = parse_imu(path)

        assert len(trace) == 2
        assert trace.accel.shape == (2, 3)
        assert trace.gyro[1, 2] == 2.0

    def test_wrong_columns(self, tmp_path: Path):
        path = tmp_path / "imu.csv"
        path.write_text("time,ax,ay,az\n0,0,0,0\n")

        with pytest.raises(MalformedFile, match="columns"):
            parse_imu(path)

    def test_non_monotone_time(self, tmp_path: Path):
        path = tmp_path / "imu.csv"
        path.write_text("t,ax,ay,az,gx,gy,gz\n0.0,0,0,0,0,0,0\n0.1,0,0,0,0,0,0\n0.1,0,0,0,0,0,0\n")

        with pytest.raises(NonMonotoneFrames) as exc:
            parse_imu(path)
        assert exc.value.line_no == 4


class TestValidateSession:
    def test_single_view_warns(self):
        manifest = manifest_from_dict(make_manifest_dict())

        report = validate_session(manifest, {"cam0": make_frames(10)})

        assert not report.failed
        assert any("single-view" in w for w in report.warnings)

    def test_three_views_at_120_pass(self):
        views = [{"view_id": f"c{i}", "camera_angle_deg": 120 * i, "pose_dir": "p"} for i in range(3)]
        manifest = manifest_from_dict(make_manifest_dict(views=views))

        report = validate_session(manifest, {f"c{i}": make_frames(5, f"c{i}") for i in range(3)})

        layout = next(c for c in report.checks if c.name == "view_layout")
        assert layout.status == "pass"
        assert report.warnings == []

    def test_bad_spacing_warns(self):
        views = [{"view_id": f"c{i}", "camera_angle_deg": a, "pose_dir": "p"} for i, a in enumerate((0, 90, 180))]
        manifest = manifest_from_dict(make_manifest_dict(views=views))

        report = validate_session(manifest, {f"c{i}": make_frames(5, f"c{i}") for i in range(3)})

        layout = next(c for c in report.checks if c.name == "view_layout")
        assert layout.status == "warn"

    def test_low_visibility_fails(self):
        manifest = manifest_from_dict(make_manifest_dict())
        frames = make_frames(10)
        for f in frames[:3]:
            f.present[3] = False  # RElbow: 70% < 80%

        report = validate_session(manifest, {"cam0": frames})

        assert report.failed
        failing = [c for c in report.checks if c.status == "fail"]
        assert "RElbow" in failing[0].message

    def test_visibility_at_threshold_passes(self):
        manifest = manifest_from_dict(make_manifest_dict())
        frames = make_frames(10)
        for f in frames[:2]:
            f.present[3] = False  # exactly 80%

        assert not validate_session(manifest, {"cam0": frames}).failed

    def test_untracked_joint_ignored(self):
        manifest = manifest_from_dict(make_manifest_dict())
        frames = make_frames(10)
        for f in frames:
            f.present[0] = False  # Nose is no angle vertex

        assert not validate_session(manifest, {"cam0": frames}, AnalysisConfig()).failed

    def test_imu_misaligned_warns(self):
        manifest = manifest_from_dict(make_manifest_dict())
        trace = ImuTrace(t=np.array([100.0, 100.01]), accel=np.zeros((2, 3)), gyro=np.zeros((2, 3)))

        report = validate_session(manifest, {"cam0": make_frames(30)}, traces={"cam0": trace})

        imu = next(c for c in report.checks if c.name == "imu_alignment")
        assert imu.status == "warn"
        assert not report.failed

    @settings(max_examples=50)
    @given(st.lists(st.lists(st.booleans(), min_size=NUM_KEYPOINTS, max_size=NUM_KEYPOINTS), min_size=1, max_size=20))
    def test_pure(self, masks):
        manifest = manifest_from_dict(make_manifest_dict())
        config = AnalysisConfig()
        frames = make_frames(len(masks))
        for frame, mask in zip(frames, masks):
            frame.present[:] = mask
        before = [f.present.copy() for f in frames]
        config_before = config.to_dict()

        first = validate_session(manifest, {"cam0": frames}, config)
        second = validate_session(manifest, {"cam0": frames}, config)

        assert first.checks == second.checks
        assert config.to_dict() == config_before
        for frame, mask in zip(frames, before):
            np.testing.assert_array_equal(frame.present, mask)


class TestUnreadableFiles:
    def test_missing_trajectory_is_malformed(self, tmp_path: Path):
        with pytest.raises(MalformedFile):
            parse_trajectory(tmp_path / "track.csv", TrajectorySpace.COURT)

    def test_missing_imu_is_malformed(self, tmp_path: Path):
        with pytest.raises(MalformedFile):
            parse_imu(tmp_path / "imu.csv")
