"""Configuration for the shuttlesense analysis pipeline."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import structlog

from shuttlesense.errors import ConfigError
from shuttlesense.types import AngleDefinition

log = structlog.get_logger()

CONFIG_ENV_VAR = "SHUTTLESENSE_CONFIG"


def default_angles() -> list[AngleDefinition]:
    """Racket-arm, free-arm and leg angles tracked by default."""
    return [
        AngleDefinition("RElbow", 2, 3, 4),
        AngleDefinition("LElbow", 5, 6, 7),
        AngleDefinition("RShoulder", 1, 2, 3),
        AngleDefinition("LShoulder", 1, 5, 6),
        AngleDefinition("RKnee", 9, 10, 11),
        AngleDefinition("LKnee", 12, 13, 14),
        AngleDefinition("RHip", 1, 9, 10),
        AngleDefinition("LHip", 1, 12, 13),
    ]


@dataclass
class IngestConfig:
    confidence_floor: float = 0.1
    v_min: float = 0.8
    angle_tolerance_deg: float = 1.0  # slack for the 120 degree camera layout check


@dataclass
class KinematicsConfig:
    angles: list[AngleDefinition] = field(default_factory=default_angles)
    max_gap_s: float = 0.1
    smooth_window_s: float = 0.15


@dataclass
class StrokeConfig:
    s_trigger: float = 4.0
    min_gap_s: float = 0.5
    fast_speed: float = 6.0
    slow_speed: float = 2.5
    outgoing_threshold_deg: float = 20.0
    outgoing_frames: int = 5
    r_eff: float = 0.6
    racket_mass: float = 0.09
    efficiency: float = 0.25


@dataclass
class ReferenceConfig:
    p_lo: float = 10.0
    p_hi: float = 90.0
    n_min: int = 5
    d_norm: float = 6.0  # degrees of mean out-of-band deviation that score 0
    hard_limits: dict[str, list[float]] = field(default_factory=dict)


@dataclass
class CourtConfig:
    rows: int = 3
    cols: int = 3
    sigma: float = 0.25
    amplitude: float = 1.0
    resolution: float = 0.05
    truncate_sigmas: float = 4.0


@dataclass
class SimConfig:
    terminal_velocity: float = 6.7
    g: float = 9.81
    dt: float = 0.001
    t_max: float = 10.0


@dataclass
class ReportConfig:
    top_k: int = 10
    severity_threshold: float = 2.0


@dataclass
class AnalysisConfig:
    ingest: IngestConfig = field(default_factory=IngestConfig)
    kinematics: KinematicsConfig = field(default_factory=KinematicsConfig)
    strokes: StrokeConfig = field(default_factory=StrokeConfig)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    court: CourtConfig = field(default_factory=CourtConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    seed: int | None = None  # overrides fixture spec seeds when set

    def validate(self) -> None:
        """Raise ConfigError if any value is outside its documented range."""
        checks: list[tuple[bool, str]] = [
            (0.0 <= self.ingest.confidence_floor <= 1.0, "ingest.confidence_floor must be in [0, 1]"),
            (0.0 <= self.ingest.v_min <= 1.0, "ingest.v_min must be in [0, 1]"),
            (self.ingest.angle_tolerance_deg >= 0, "ingest.angle_tolerance_deg must be >= 0"),
            (len(self.kinematics.angles) > 0, "kinematics.angles must not be empty"),
            (self.kinematics.max_gap_s >= 0, "kinematics.max_gap_s must be >= 0"),
            (self.kinematics.smooth_window_s >= 0, "kinematics.smooth_window_s must be >= 0"),
            (self.strokes.s_trigger > 0, "strokes.s_trigger must be > 0"),
            (self.strokes.min_gap_s >= 0, "strokes.min_gap_s must be >= 0"),
            (0 < self.strokes.slow_speed < self.strokes.fast_speed,
             "strokes.slow_speed must be positive and below strokes.fast_speed"),
            (self.strokes.outgoing_threshold_deg >= 0, "strokes.outgoing_threshold_deg must be >= 0"),
            (self.strokes.outgoing_frames >= 1, "strokes.outgoing_frames must be >= 1"),
            (self.strokes.r_eff > 0, "strokes.r_eff must be > 0"),
            (self.strokes.racket_mass > 0, "strokes.racket_mass must be > 0"),
            (0 < self.strokes.efficiency <= 1, "strokes.efficiency must be in (0, 1]"),
            (0 <= self.reference.p_lo < self.reference.p_hi <= 100,
             "reference percentiles need 0 <= p_lo < p_hi <= 100"),
            (self.reference.n_min >= 1, "reference.n_min must be >= 1"),
            (self.reference.d_norm > 0, "reference.d_norm must be > 0"),
            (self.court.rows >= 1 and self.court.cols >= 1, "court.rows and court.cols must be >= 1"),
            (self.court.sigma > 0, "court.sigma must be > 0"),
            (self.court.amplitude > 0, "court.amplitude must be > 0"),
            (self.court.resolution > 0, "court.resolution must be > 0"),
            (self.court.truncate_sigmas > 0, "court.truncate_sigmas must be > 0"),
            (self.sim.terminal_velocity > 0, "sim.terminal_velocity must be > 0"),
            (self.sim.g > 0, "sim.g must be > 0"),
            (self.sim.dt > 0, "sim.dt must be > 0"),
            (self.sim.t_max > 0, "sim.t_max must be > 0"),
            (self.report.top_k >= 1, "report.top_k must be >= 1"),
            (self.report.severity_threshold >= 0, "report.severity_threshold must be >= 0"),
            (self.seed is None or self.seed >= 0, "seed must be >= 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)

        names = [a.name for a in self.kinematics.angles]
        if len(set(names)) != len(names):
            raise ConfigError("kinematics.angles names must be unique")
        for angle in self.kinematics.angles:
            joints = (angle.a, angle.b, angle.c)
            if len(set(joints)) != 3 or not all(0 <= j <= 24 for j in joints):
                raise ConfigError(f"angle {angle.name}: joints must be distinct indices in [0, 24]")
        for name, limits in self.reference.hard_limits.items():
            if len(limits) != 2 or not 0 <= limits[0] <= limits[1] <= 180:
                raise ConfigError(f"reference.hard_limits.{name} must be [min, max] within [0, 180]")

    def to_dict(self) -> dict[str, Any]:
        """Config echo: every tunable, JSON-ready."""
        data = dataclasses.asdict(self)
        data["kinematics"]["angles"] = [
            {"name": a.name, "joints": [a.a, a.b, a.c]} for a in self.kinematics.angles
        ]
        return data


def _merge_section(section: Any, values: dict[str, Any], prefix: str) -> None:
    known = {f.name: f for f in dataclasses.fields(section)}
    for key, value in values.items():
        dotted = f"{prefix}{key}"
        if key not in known:
            raise ConfigError(f"unknown config key: {dotted}")
        current = getattr(section, key)
        if dataclasses.is_dataclass(current):
            if not isinstance(value, dict):
                raise ConfigError(f"{dotted} must be an object")
            _merge_section(current, value, f"{dotted}.")
        elif key == "angles":
            setattr(section, key, _parse_angles(value, dotted))
        elif isinstance(current, bool) or isinstance(value, bool):
            raise ConfigError(f"{dotted} has an unsupported type")
        elif key == "seed":
            if value is not None and not isinstance(value, int):
                raise ConfigError(f"{dotted} must be an integer")
            setattr(section, key, value)
        elif isinstance(current, int) and not isinstance(current, bool):
            if not isinstance(value, int):
                raise ConfigError(f"{dotted} must be an integer")
            setattr(section, key, value)
        elif isinstance(current, float):
            if not isinstance(value, (int, float)):
                raise ConfigError(f"{dotted} must be a number")
            setattr(section, key, float(value))
        elif isinstance(current, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{dotted} must be an object")
            setattr(section, key, {str(k): [float(x) for x in v] for k, v in value.items()})
        else:
            setattr(section, key, value)


def _parse_angles(value: Any, dotted: str) -> list[AngleDefinition]:
    if not isinstance(value, list):
        raise ConfigError(f"{dotted} must be a list")
    angles: list[AngleDefinition] = []
    for entry in value:
        try:
            a, b, c = (int(j) for j in entry["joints"])
            angles.append(AngleDefinition(str(entry["name"]), a, b, c))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"{dotted}: each entry needs a name and three joints ({e})") from e
    return angles


def config_from_dict(values: dict[str, Any]) -> AnalysisConfig:
    """Layer a (possibly partial) mapping over the defaults and validate."""
    config = AnalysisConfig()
    _merge_section(config, values, "")
    config.validate()
    return config


def load_config(path: str | Path | None = None) -> AnalysisConfig:
    """Load config from `path`, else SHUTTLESENSE_CONFIG, else defaults."""
    if path is None:
        env_path = os.environ.get(CONFIG_ENV_VAR)
        path = env_path or None
    if path is None:
        config = AnalysisConfig()
        config.validate()
        return config

    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        values = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(values, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    config = config_from_dict(values)
    log.info("config_loaded", path=str(path))
    return config
