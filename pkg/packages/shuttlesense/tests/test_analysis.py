"""End-to-end tests for SessionAnalyzer over generated sessions."""

import json
from pathlib import Path

import numpy as np
import pytest

from shuttlesense.analysis import SessionAnalyzer
from shuttlesense.config import AnalysisConfig, ReferenceConfig
from shuttlesense.evaluation import evaluate_detections, load_truth
from shuttlesense.fixtures import DEFAULT_MIX, FixtureSpec, generate_fixture_session
from shuttlesense.reference import DEFAULT_D_NORM, build_envelope, rank_faults, summarize_accuracy
from shuttlesense.types import StrokeClass

from tests.conftest import ELBOW_FAULT


def span_overlap(found: tuple[float, float], injected: tuple[float, float]) -> float:
    """Fraction of the injected span covered by the reported one."""
    lo = max(found[0], injected[0])
    hi = min(found[1], injected[1])
    return max(0.0, hi - lo) / (injected[1] - injected[0])


@pytest.fixture(scope="module")
def reference_analysis(reference_session):
    return SessionAnalyzer().analyze_session(reference_session.manifest_path)


class TestDetection:
    def test_every_stroke_found(self, reference_analysis, reference_session):
        truth = load_truth(reference_session.truth_path)

        metrics = evaluate_detections(reference_analysis.features, truth)

        assert metrics.truth_count == 50
        assert metrics.recall == 1.0
        assert metrics.precision == 1.0

    @pytest.mark.parametrize("stroke_class", list(DEFAULT_MIX))
    def test_every_class_detected(self, stroke_class, tmp_path: Path):
        spec = FixtureSpec(seed=17, class_mix={stroke_class: 1.0}, strokes_per_class=6)
        session = generate_fixture_session(spec, tmp_path)

        features = SessionAnalyzer().analyze_session(session.manifest_path).features
        metrics = evaluate_detections(features, load_truth(session.truth_path))

        assert metrics.truth_count == 6
        assert metrics.recall == 1.0

    def test_classes_recovered(self, reference_analysis, reference_session):
        truth = load_truth(reference_session.truth_path)

        metrics = evaluate_detections(reference_analysis.features, truth)

        assert metrics.class_accuracy >= 0.9

    def test_segments_in_frame_order(self, reference_analysis):
        peaks = [f.segment.peak_frame for f in reference_analysis.features]

        assert peaks == sorted(peaks)
        for f in reference_analysis.features:
            assert f.segment.start_frame <= f.segment.peak_frame <= f.segment.end_frame

    def test_phase_profiles_have_fixed_length(self, reference_analysis):
        for f in reference_analysis.features:
            for values in f.angle_phase.values():
                assert values is None or values.shape == (64,)


class TestSessionOutputs:
    def test_swings_from_imu(self, reference_analysis):
        swings = reference_analysis.swings

        assert len(swings) == len(reference_analysis.features)
        assert all(m.head_speed > 0 for _, m in swings)

    def test_landings_in_court(self, reference_analysis):
        landings = reference_analysis.landings()

        assert len(landings) == len(reference_analysis.features)
        for obs in landings:
            assert obs.origin is not None and obs.landing is not None
            assert 0.0 <= obs.landing[0] <= 6.1
            assert 0.0 <= obs.landing[1] <= 13.4

    def test_heatmaps_cover_classes(self, reference_analysis):
        analyzer = SessionAnalyzer()

        heatmaps = analyzer.heatmaps(reference_analysis.landings())

        assert {cls for _, cls in heatmaps} == {f.stroke_class for f in reference_analysis.features}
        assert sum(h.count for h in heatmaps.values()) == len(reference_analysis.features)
        assert analyzer.stats.landings_skipped == 0

    def test_stats(self, reference_session):
        analyzer = SessionAnalyzer()

        analysis = analyzer.analyze_session(reference_session.manifest_path)

        assert analyzer.stats.views == 1
        assert analyzer.stats.segments == len(analysis.features)
        assert sum(analyzer.stats.classes.values()) == len(analysis.features)

    def test_failed_validation_yields_no_views(self, reference_session, tmp_path: Path):
        manifest = json.loads(reference_session.manifest_path.read_text())
        manifest["views"][0]["pose_dir"] = str(reference_session.directory / "pose" / "cam0")
        manifest["views"][0]["trajectory_path"] = str(reference_session.directory / "trajectory_cam0.csv")
        manifest["views"][0].pop("imu_path")
        config = AnalysisConfig()
        config.ingest.v_min = 1.01
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest))

        analysis = SessionAnalyzer(config).analyze_session(path)

        assert analysis.validation.failed
        assert analysis.views == []


class TestScoring:
    def test_full_range_envelope_scores_reference_perfectly(self, reference_analysis):
        model = build_envelope(reference_analysis.features, p_lo=0.0, p_hi=100.0)

        scores, unknown = SessionAnalyzer().score(reference_analysis.features, model)

        assert unknown == []
        assert [s.accuracy for s in scores] == [100.0] * len(scores)

    def test_reference_scores_high_against_own_envelope(self, reference_analysis, reference_envelope):
        _, model = reference_envelope

        scores, _ = SessionAnalyzer().score(reference_analysis.features, model)

        assert float(np.median([s.accuracy for s in scores])) >= 95.0

    def test_unknown_class_reported(self, reference_analysis):
        clears = [f for f in reference_analysis.features if f.stroke_class == StrokeClass.CLEAR]
        others = [f for f in reference_analysis.features if f.stroke_class != StrokeClass.CLEAR]
        model = build_envelope(clears)
        analyzer = SessionAnalyzer()

        scores, unknown = analyzer.score(others, model)

        assert scores == []
        assert len(unknown) == len(others)
        assert analyzer.stats.unknown_class == len(others)

    def test_hard_limits_override_bands(self, reference_analysis, reference_envelope):
        _, model = reference_envelope
        config = AnalysisConfig(reference=ReferenceConfig(hard_limits={"RElbow": [0.0, 180.0]}))

        scores, _ = SessionAnalyzer(config).score(reference_analysis.features, model)

        assert all(s.deviations["RElbow"].max_dev == 0.0 for s in scores if "RElbow" in s.deviations)
        assert model.bands[(StrokeClass.CLEAR, "RElbow")].lo.max() > 0.0


class TestInjectedFault:
    @pytest.fixture(scope="class")
    def analyzer(self):
        return SessionAnalyzer()

    def test_fault_ranks_first(self, analyzer, faulted_trainee, reference_envelope):
        _, model = reference_envelope
        features = analyzer.analyze_session(faulted_trainee.manifest_path).features

        scores, _ = analyzer.score(features, model)
        top = rank_faults(scores)[0]

        assert (top.angle_name, top.stroke_class) == (ELBOW_FAULT.angle_name, ELBOW_FAULT.stroke_class)
        assert top.direction == "above"
        assert span_overlap(top.worst_phase_span, ELBOW_FAULT.phase_span) >= 0.5

    def test_fault_span_is_localized(self, analyzer, faulted_trainee, reference_envelope):
        _, model = reference_envelope
        features = analyzer.analyze_session(faulted_trainee.manifest_path).features

        scores, _ = analyzer.score(features, model)
        lo, hi = rank_faults(scores)[0].worst_phase_span

        assert 0.2 <= lo < hi <= 0.7
        assert hi - lo <= 0.5
        for score in scores:
            span = score.deviations[ELBOW_FAULT.angle_name].worst_phase_span
            assert span is None or span != (0.0, 1.0)

    def test_fault_lowers_accuracy(self, analyzer, faulted_trainee, clean_trainee, reference_envelope):
        _, model = reference_envelope

        faulted, _ = analyzer.score(analyzer.analyze_session(faulted_trainee.manifest_path).features, model)
        clean, _ = analyzer.score(analyzer.analyze_session(clean_trainee.manifest_path).features, model)

        faulted_acc = summarize_accuracy(faulted).session_accuracy
        clean_acc = summarize_accuracy(clean).session_accuracy
        assert analyzer.config.reference.d_norm == DEFAULT_D_NORM
        assert clean_acc - faulted_acc >= 5.0
