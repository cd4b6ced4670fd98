"""Tests for the kinematics module (angles, gap filling, smoothing, normalization)."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from shuttlesense.config import KinematicsConfig
from shuttlesense.errors import BadWindow, DegenerateJoint, MissingTorso
from shuttlesense.kinematics import (
    angle_at_joint,
    compute_angle_series,
    default_max_gap,
    default_smooth_window,
    densify,
    fill_gaps,
    normalize_sequence,
    normalize_skeleton,
    prepare_angle_series,
    smooth,
)
from shuttlesense.types import MID_HIP, NECK, AngleDefinition, JointAngleSeries, SkeletonFrame

coords = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False, allow_infinity=False)
points = st.tuples(coords, coords)
gappy_series = st.lists(
    st.one_of(st.none(), st.floats(min_value=0.0, max_value=180.0)), min_size=1, max_size=40
).map(lambda xs: [np.nan if x is None else x for x in xs])


def make_series(values: list[float], name: str = "RElbow") -> JointAngleSeries:
    return JointAngleSeries(name, np.array(values, dtype=float), 30.0)


def make_frame(index: int, keypoints: dict[int, tuple[float, float]], view_id: str = "cam0") -> SkeletonFrame:
    frame = SkeletonFrame.empty(index, view_id)
    for slot, (x, y) in keypoints.items():
        frame.xy[slot] = (x, y)
        frame.present[slot] = True
        frame.confidence[slot] = 0.9
    return frame


def transform(p: tuple[float, float], theta: float, scale: float, shift: tuple[float, float]) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    return (scale * (c * p[0] - s * p[1]) + shift[0], scale * (s * p[0] + c * p[1]) + shift[1])


def ray_length(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


class TestAngleAtJoint:
    def test_right_angle(self):
        assert angle_at_joint((1, 0), (0, 0), (0, 1)) == pytest.approx(90.0)

    def test_straight_and_folded(self):
        assert angle_at_joint((-1, 0), (0, 0), (1, 0)) == pytest.approx(180.0)
        assert angle_at_joint((1, 0), (0, 0), (2, 0)) == pytest.approx(0.0)

    def test_degenerate_ray(self):
        with pytest.raises(DegenerateJoint):
            angle_at_joint((0, 0), (0, 0), (1, 1))

    def test_agrees_with_arccos(self):
        rng = np.random.default_rng(0)
        triples = rng.uniform(-100.0, 100.0, size=(1000, 3, 2))

        for a, b, c in triples:
            ba, bc = a - b, c - b
            cos = np.dot(ba, bc) / (np.linalg.norm(ba) * np.linalg.norm(bc))
            expected = math.degrees(math.acos(float(np.clip(cos, -1.0, 1.0))))
            assert abs(angle_at_joint(a, b, c) - expected) < 1e-9

    @given(points, points, points)
    def test_range(self, a, b, c):
        assume(ray_length(a, b) > 1e-3 and ray_length(c, b) > 1e-3)

        assert 0.0 <= angle_at_joint(a, b, c) <= 180.0

    @given(points, points, points)
    def test_symmetric_in_outer_points(self, a, b, c):
        assume(ray_length(a, b) > 1e-3 and ray_length(c, b) > 1e-3)

        assert angle_at_joint(a, b, c) == pytest.approx(angle_at_joint(c, b, a), abs=1e-9)

    @settings(max_examples=200)
    @given(
        points,
        points,
        points,
        st.floats(min_value=-math.pi, max_value=math.pi),
        st.floats(min_value=0.1, max_value=10.0),
        points,
    )
    def test_similarity_invariant(self, a, b, c, theta, scale, shift):
        assume(ray_length(a, b) > 1.0 and ray_length(c, b) > 1.0)

        before = angle_at_joint(a, b, c)
        after = angle_at_joint(*(transform(p, theta, scale, shift) for p in (a, b, c)))

        assert after == pytest.approx(before, abs=1e-6)


class TestComputeAngleSeries:
    def test_missing_keypoint_gives_nan(self):
        d = AngleDefinition("RElbow", 2, 3, 4)
        frames = [
            make_frame(0, {2: (0, 0), 3: (1, 0), 4: (1, 1)}),
            make_frame(1, {2: (0, 0), 3: (1, 0)}),
        ]

        [series] = compute_angle_series(frames, [d], fps=30)

        assert series.values[0] == pytest.approx(90.0)
        assert math.isnan(series.values[1])
        assert series.angle_name == "RElbow"

    def test_matches_scalar_angle(self):
        d = AngleDefinition("RKnee", 9, 10, 11)
        kp = {9: (3.0, 1.0), 10: (2.5, 3.0), 11: (4.0, 4.5)}

        [series] = compute_angle_series([make_frame(0, kp)], [d])

        assert series.values[0] == pytest.approx(angle_at_joint(kp[9], kp[10], kp[11]))

    def test_no_definitions(self):
        with pytest.raises(ValueError):
            compute_angle_series([make_frame(0, {})], [])

    def test_empty_frames(self):
        [series] = compute_angle_series([], [AngleDefinition("A", 0, 1, 2)])

        assert len(series) == 0


class TestFillGaps:
    def test_interior_gap_interpolated(self):
        out = fill_gaps(make_series([10, np.nan, np.nan, 40]), max_gap=2)

        assert out.values.tolist() == pytest.approx([10, 20, 30, 40])

    def test_long_gap_kept(self):
        out = fill_gaps(make_series([10, np.nan, np.nan, np.nan, 50]), max_gap=2)

        assert np.isnan(out.values[1:4]).all()

    def test_edges_not_extrapolated(self):
        out = fill_gaps(make_series([np.nan, 10, 20, np.nan]), max_gap=5)

        assert math.isnan(out.values[0])
        assert math.isnan(out.values[3])

    def test_input_untouched(self):
        series = make_series([1, np.nan, 3])

        fill_gaps(series, 1)

        assert math.isnan(series.values[1])

    @given(gappy_series, st.integers(min_value=0, max_value=6))
    def test_idempotent(self, values, max_gap):
        once = fill_gaps(make_series(values), max_gap)
        twice = fill_gaps(once, max_gap)

        np.testing.assert_array_equal(twice.values, once.values)

    @given(gappy_series, st.integers(min_value=0, max_value=6))
    def test_present_values_kept(self, values, max_gap):
        series = make_series(values)
        present = ~np.isnan(series.values)

        out = fill_gaps(series, max_gap)

        np.testing.assert_array_equal(out.values[present], series.values[present])


class TestSmooth:
    def test_window_one_is_identity(self):
        series = make_series([1, 5, 2])

        assert smooth(series, 1).values.tolist() == [1, 5, 2]

    def test_moving_average(self):
        out = smooth(make_series([0, 3, 6, 9]), 3)

        assert out.values.tolist() == pytest.approx([1.5, 3, 6, 7.5])

    def test_missing_stays_missing(self):
        out = smooth(make_series([0, np.nan, 6, 9]), 3)

        assert math.isnan(out.values[1])
        assert out.values[2] == pytest.approx(7.5)

    @pytest.mark.parametrize("window", [0, 2, -1])
    def test_bad_window(self, window):
        with pytest.raises(BadWindow):
            smooth(make_series([1, 2, 3]), window)

    @given(gappy_series, st.sampled_from([1, 3, 5, 7]))
    def test_stays_within_window_range(self, values, window):
        series = make_series(values)
        half = window // 2

        out = smooth(series, window)

        for i, value in enumerate(out.values):
            if np.isnan(value):
                continue
            neighbours = series.values[max(0, i - half) : i + half + 1]
            assert np.nanmin(neighbours) - 1e-9 <= value <= np.nanmax(neighbours) + 1e-9


class TestNormalize:
    def test_torso_becomes_unit(self):
        frame = make_frame(0, {NECK: (100, 50), MID_HIP: (100, 200), 4: (250, 200)})

        out = normalize_skeleton(frame)

        assert out.xy[MID_HIP].tolist() == [0, 0]
        assert out.xy[NECK].tolist() == pytest.approx([0, -1])
        assert out.xy[4].tolist() == pytest.approx([1, 0])

    def test_missing_torso(self):
        with pytest.raises(MissingTorso):
            normalize_skeleton(make_frame(0, {NECK: (0, 0)}))

    def test_sequence_blanks_frames_without_torso(self):
        frames = [make_frame(0, {NECK: (0, 0), MID_HIP: (0, 10)}), make_frame(1, {NECK: (0, 0)})]

        out = normalize_sequence(frames)

        assert out[0].present[NECK]
        assert not out[1].present.any()
        assert out[1].frame_index == 1


class TestDensify:
    def test_fills_skipped_indices(self):
        frames = [make_frame(3, {NECK: (0, 0)}), make_frame(6, {NECK: (0, 0)})]

        out = densify(frames)

        assert [f.frame_index for f in out] == [3, 4, 5, 6]
        assert not out[1].present.any()
        assert out[0] is frames[0]

    def test_empty(self):
        assert densify([]) == []


class TestDefaults:
    def test_windows_at_30_fps(self):
        assert default_max_gap(30, 0.1) == 3
        assert default_smooth_window(30, 0.15) == 5

    def test_window_always_odd(self):
        for fps in (10, 24, 25, 30, 60, 120, 240):
            assert default_smooth_window(fps) % 2 == 1

    def test_prepare_angle_series(self):
        config = KinematicsConfig(angles=[AngleDefinition("RElbow", 2, 3, 4)])
        frames = [make_frame(i, {2: (0, 0), 3: (1, 0), 4: (1, 1)}) for i in range(10)]

        [series] = prepare_angle_series(frames, config, fps=30)

        assert series.values == pytest.approx(np.full(10, 90.0))
