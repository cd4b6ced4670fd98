"""Exception hierarchy for shuttlesense.

Library code raises these; only the CLI maps them to exit codes.
"""

from __future__ import annotations

from pathlib import Path


class ShuttleSenseError(Exception):
    """Base class for every error raised by shuttlesense."""


class UsageError(ShuttleSenseError):
    """Bad invocation: unknown config keys, missing paths, invalid parameters."""


class DataError(ShuttleSenseError):
    """Input data is malformed or inconsistent."""


class ConfigError(UsageError):
    pass


class BadParameter(UsageError, ValueError):
    """A library call got a parameter outside its domain."""


# --- ingest ---


class MalformedFile(DataError):
    def __init__(self, path: str | Path, reason: str = "") -> None:
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"malformed file {self.path}" + (f": {reason}" if reason else ""))


class EmptySession(DataError):
    def __init__(self, location: str | Path) -> None:
        self.location = str(location)
        super().__init__(f"no frames found in {self.location}")


class BadKeypointCount(DataError):
    def __init__(self, path: str | Path, count: int) -> None:
        self.path = Path(path)
        self.count = count
        super().__init__(f"{self.path}: person record holds {count} values, expected 75")


class MalformedRow(DataError):
    def __init__(self, line_no: int, reason: str = "") -> None:
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed row at line {line_no}" + (f": {reason}" if reason else ""))


class NonMonotoneFrames(DataError):
    def __init__(self, line_no: int, previous: float, current: float) -> None:
        self.line_no = line_no
        self.previous = previous
        self.current = current
        super().__init__(f"line {line_no}: index {current} does not follow {previous}")


class ManifestError(DataError):
    pass


# --- kinematics ---


class DegenerateJoint(DataError):
    pass


class MissingTorso(DataError):
    pass


class BadWindow(UsageError):
    def __init__(self, window: int) -> None:
        self.window = window
        super().__init__(f"smoothing window must be odd and >= 1, got {window}")


# --- strokes ---


class EmptyStroke(DataError):
    pass


class EmptyWindow(DataError):
    def __init__(self, t_start: float, t_end: float) -> None:
        self.t_start = t_start
        self.t_end = t_end
        super().__init__(f"no IMU samples in [{t_start:.3f}, {t_end:.3f}] s")


# --- reference ---


class EmptyReference(DataError):
    pass


class UnknownClass(DataError):
    def __init__(self, stroke_class: str) -> None:
        self.stroke_class = stroke_class
        super().__init__(f"envelope has no entry for stroke class {stroke_class}")


# --- court ---


class OutOfCourt(DataError):
    def __init__(self, point: tuple[float, float]) -> None:
        self.point = point
        super().__init__(f"point ({point[0]:.3f}, {point[1]:.3f}) lies outside the court")


class EmptyHeatmap(DataError):
    pass


# --- shuttlesim ---


class NoLanding(DataError):
    def __init__(self, t_max: float) -> None:
        self.t_max = t_max
        super().__init__(f"shuttle did not land within {t_max} s")


class BadSpec(UsageError):
    pass
