"""Court geometry, landing zones and Gaussian landing heatmaps."""

from __future__ import annotations

import math

import numpy as np
import structlog

from shuttlesense.config import CourtConfig
from shuttlesense.errors import EmptyHeatmap, OutOfCourt
from shuttlesense.types import (
    CourtGeometry,
    LandingHeatmap,
    LandingObservation,
    StrokeClass,
    ZoneGrid,
)

log = structlog.get_logger()

COURT = CourtGeometry()


def _check_in_court(point: tuple[float, float], geometry: CourtGeometry) -> tuple[float, float]:
    x, y = float(point[0]), float(point[1])
    if not (0.0 <= x <= geometry.width and 0.0 <= y <= geometry.length):
        raise OutOfCourt((x, y))
    return x, y


def zone_edges(grid: ZoneGrid = ZoneGrid(), geometry: CourtGeometry = COURT) -> tuple[np.ndarray, np.ndarray]:
    """Zone cell boundaries across the court (x) and along its full length (y)."""
    half = np.linspace(0.0, geometry.net_y, grid.rows + 1)
    return (
        np.linspace(0.0, geometry.width, grid.cols + 1),
        np.concatenate([half, geometry.net_y + half[1:]]),
    )


def zone_of(
    point: tuple[float, float],
    grid: ZoneGrid = ZoneGrid(),
    geometry: CourtGeometry = COURT,
) -> int:
    """Zone id of a court point: near half first, row-major within a half.

    Cells are half-open, so a point on a boundary belongs to the higher cell,
    except on the far sidelines where it stays in the last cell.
    """
    x, y = _check_in_court(point, geometry)
    x_edges, y_edges = zone_edges(grid, geometry)
    row = min(int(np.searchsorted(y_edges, y, side="right")) - 1, 2 * grid.rows - 1)
    col = min(int(np.searchsorted(x_edges, x, side="right")) - 1, grid.cols - 1)
    return row * grid.cols + col


def grid_shape(resolution: float, geometry: CourtGeometry = COURT) -> tuple[int, int]:
    """(rows along the court length, columns across it)."""
    return (
        math.ceil(geometry.length / resolution - 1e-9),
        math.ceil(geometry.width / resolution - 1e-9),
    )


def cell_center(row: int, col: int, resolution: float) -> tuple[float, float]:
    """Court (x, y) of a cell center."""
    return (col + 0.5) * resolution, (row + 0.5) * resolution


def empty_heatmap(
    origin_zone: int,
    stroke_class: StrokeClass,
    config: CourtConfig | None = None,
    geometry: CourtGeometry = COURT,
) -> LandingHeatmap:
    config = config or CourtConfig()
    return LandingHeatmap(
        grid=np.zeros(grid_shape(config.resolution, geometry)),
        resolution=config.resolution,
        origin_zone=origin_zone,
        stroke_class=stroke_class,
    )


def splat_gaussian(
    heatmap: LandingHeatmap,
    center: tuple[float, float],
    config: CourtConfig | None = None,
    geometry: CourtGeometry = COURT,
) -> LandingHeatmap:
    """Add an isotropic Gaussian bump at `center`, truncated at `truncate_sigmas` sigma.

    Evaluated at cell centers. The heatmap is updated in place and returned.
    """
    config = config or CourtConfig()
    cx, cy = _check_in_court(center, geometry)
    res = heatmap.resolution
    h, w = heatmap.grid.shape
    radius = config.truncate_sigmas * config.sigma

    ys = (np.arange(h) + 0.5) * res
    xs = (np.arange(w) + 0.5) * res
    rows = np.flatnonzero(np.abs(ys - cy) <= radius)
    cols = np.flatnonzero(np.abs(xs - cx) <= radius)
    if len(rows) == 0 or len(cols) == 0:
        return heatmap

    dy = ys[rows][:, None] - cy
    dx = xs[cols][None, :] - cx
    d2 = dx * dx + dy * dy
    gain = config.amplitude * np.exp(-d2 / (2.0 * config.sigma**2))
    gain[d2 > radius * radius] = 0.0
    heatmap.grid[rows[0]: rows[-1] + 1, cols[0]: cols[-1] + 1] += gain
    heatmap.count += 1
    heatmap.normalized = False
    return heatmap


def normalize_heatmap(heatmap: LandingHeatmap) -> LandingHeatmap:
    """Copy scaled to unit sum."""
    total = float(heatmap.grid.sum())
    if total <= 0:
        raise EmptyHeatmap(f"heatmap for zone {heatmap.origin_zone} / {heatmap.stroke_class} is empty")
    return LandingHeatmap(
        grid=heatmap.grid / total,
        resolution=heatmap.resolution,
        origin_zone=heatmap.origin_zone,
        stroke_class=heatmap.stroke_class,
        normalized=True,
        count=heatmap.count,
    )


def accumulate_landings(
    observations: list[LandingObservation],
    grid: ZoneGrid = ZoneGrid(),
    config: CourtConfig | None = None,
    geometry: CourtGeometry = COURT,
) -> tuple[dict[tuple[int, StrokeClass], LandingHeatmap], int]:
    """One heatmap per observed (origin zone, class), plus the number of skipped strokes.

    Strokes without an origin or landing, or with either outside the court, are skipped.
    """
    config = config or CourtConfig()
    heatmaps: dict[tuple[int, StrokeClass], LandingHeatmap] = {}
    skipped = 0
    for obs in observations:
        if obs.origin is None or obs.landing is None:
            skipped += 1
            continue
        try:
            zone = zone_of(obs.origin, grid, geometry)
            _check_in_court(obs.landing, geometry)
            key = (zone, obs.stroke_class)
            if key not in heatmaps:
                heatmaps[key] = empty_heatmap(zone, obs.stroke_class, config, geometry)
            splat_gaussian(heatmaps[key], obs.landing, config, geometry)
        except OutOfCourt as e:
            log.warning("landing_out_of_court", stroke_class=str(obs.stroke_class), point=e.point)
            skipped += 1
    log.info("landings_accumulated", heatmaps=len(heatmaps), strokes=len(observations), skipped=skipped)
    return dict(sorted(heatmaps.items())), skipped


def most_probable_zone(
    heatmap: LandingHeatmap,
    grid: ZoneGrid = ZoneGrid(),
    geometry: CourtGeometry = COURT,
) -> int:
    """Zone of the hottest cell; equal maxima resolve to the lowest zone id."""
    peak = float(heatmap.grid.max()) if heatmap.grid.size else 0.0
    if peak <= 0:
        raise EmptyHeatmap(f"heatmap for zone {heatmap.origin_zone} / {heatmap.stroke_class} is empty")
    zones = []
    for row, col in zip(*np.nonzero(np.isclose(heatmap.grid, peak, rtol=1e-12, atol=0.0))):
        x, y = cell_center(int(row), int(col), heatmap.resolution)
        x = min(x, geometry.width)
        y = min(y, geometry.length)
        zones.append(zone_of((x, y), grid, geometry))
    return min(zones)


def render_pgm(heatmap: LandingHeatmap) -> str:
    """Plain-text P2 grayscale image, values rescaled to 0-255."""
    h, w = heatmap.grid.shape
    peak = float(heatmap.grid.max()) if heatmap.grid.size else 0.0
    if peak > 0:
        pixels = np.rint(heatmap.grid / peak * 255).astype(int)
    else:
        pixels = np.zeros((h, w), dtype=int)
    lines = [f"P2 {w} {h} 255"]
    lines.extend(" ".join(str(v) for v in row) for row in pixels)
    return "\n".join(lines) + "\n"
