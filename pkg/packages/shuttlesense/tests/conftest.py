"""Shared synthetic sessions, generated once per test run."""

from pathlib import Path

import pytest

from shuttlesense.analysis import SessionAnalyzer
from shuttlesense.fixtures import FixtureSession, FixtureSpec, generate_fixture_session
from shuttlesense.reference import build_envelope, save_envelope
from shuttlesense.types import EnvelopeModel, InjectedFault, Role, StrokeClass

ELBOW_FAULT = InjectedFault("RElbow", StrokeClass.CLEAR, (0.3, 0.6), 15.0)


def reference_spec() -> FixtureSpec:
    return FixtureSpec(seed=11, strokes_per_class=10, role=Role.REFERENCE, session_id="reference", subject_id="coach")


def trainee_spec(faulted: bool, session_id: str, recorded_at: str) -> FixtureSpec:
    return FixtureSpec(
        seed=23,
        class_mix={StrokeClass.CLEAR: 1.0},
        strokes_per_class=6,
        injected_faults=[ELBOW_FAULT] if faulted else [],
        session_id=session_id,
        subject_id="trainee-1",
        recorded_at=recorded_at,
    )


@pytest.fixture(scope="session")
def reference_session(tmp_path_factory) -> FixtureSession:
    return generate_fixture_session(reference_spec(), tmp_path_factory.mktemp("reference"))


@pytest.fixture(scope="session")
def reference_envelope(reference_session, tmp_path_factory) -> tuple[Path, EnvelopeModel]:
    analysis = SessionAnalyzer().analyze_session(reference_session.manifest_path)
    model = build_envelope(analysis.features)
    path = tmp_path_factory.mktemp("envelope") / "envelope.json"
    save_envelope(model, path)
    return path, model


@pytest.fixture(scope="session")
def clean_trainee(tmp_path_factory) -> FixtureSession:
    spec = trainee_spec(False, "trainee-clean", "2026-03-01T10:00:00")
    return generate_fixture_session(spec, tmp_path_factory.mktemp("clean"))


@pytest.fixture(scope="session")
def faulted_trainee(tmp_path_factory) -> FixtureSession:
    spec = trainee_spec(True, "trainee-faulted", "2026-02-01T10:00:00")
    return generate_fixture_session(spec, tmp_path_factory.mktemp("faulted"))
