"""shuttlesense - Badminton stroke assessment from pose, trajectory and IMU data."""

from shuttlesense.analysis import AnalyzerStats, SessionAnalysis, SessionAnalyzer
from shuttlesense.config import AnalysisConfig, load_config
from shuttlesense.fixtures import FixtureSpec, generate_fixture_session
from shuttlesense.reference import build_envelope, load_envelope, save_envelope, score_stroke
from shuttlesense.report import assemble_report, render_markdown, serialize_report
from shuttlesense.types import AssessmentReport, EnvelopeModel, StrokeClass, StrokeFeatures

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AnalyzerStats",
    "AssessmentReport",
    "EnvelopeModel",
    "FixtureSpec",
    "SessionAnalysis",
    "SessionAnalyzer",
    "StrokeClass",
    "StrokeFeatures",
    "assemble_report",
    "build_envelope",
    "generate_fixture_session",
    "load_config",
    "load_envelope",
    "render_markdown",
    "save_envelope",
    "score_stroke",
    "serialize_report",
]
