"""CLI for badminton session assessment."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TextIO

import structlog

from shuttlesense.analysis import SessionAnalysis, SessionAnalyzer
from shuttlesense.config import AnalysisConfig, load_config
from shuttlesense.court import most_probable_zone, normalize_heatmap
from shuttlesense.errors import DataError, UsageError
from shuttlesense.evaluation import evaluate_detections, load_truth, metrics_to_dict
from shuttlesense.fixtures import generate_fixture_session, load_fixture_spec
from shuttlesense.io import dumps_canonical, write_angle_dump, write_heatmap, write_json, write_stroke_dump
from shuttlesense.logging import configure_logging
from shuttlesense.reference import build_envelope, load_envelope, save_envelope
from shuttlesense.report import (
    assemble_report,
    compare_sessions,
    load_report,
    progress_to_dict,
    progress_track,
    render_markdown,
    render_progress_markdown,
    serialize_report,
)
from shuttlesense.types import (
    HeatmapRef,
    LandingHeatmap,
    LandingObservation,
    StrokeClass,
    ValidationReport,
    ZoneGrid,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def _build_config(args: argparse.Namespace) -> AnalysisConfig:
    """Config file (or env fallback) layered with flag overrides."""
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if getattr(args, "top_k", None) is not None:
        config.report.top_k = args.top_k
    config.validate()
    return config


def _require(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"{what} not found: {path}")
    return path


def _print_validation(report: ValidationReport, stream: TextIO | None = None) -> None:
    stream = stream or sys.stdout
    for check in report.checks:
        print(f"{check.status.upper():4} {check.name}: {check.message}", file=stream)


def _analyze_or_refuse(analyzer: SessionAnalyzer, manifest: Path) -> SessionAnalysis | None:
    analysis = analyzer.analyze_session(manifest)
    if analysis.validation.failed:
        print(f"session {analysis.manifest.session_id} failed validation:", file=sys.stderr)
        _print_validation(analysis.validation, sys.stderr)
        return None
    return analysis


def _heatmap_name(zone: int, stroke_class: StrokeClass) -> str:
    return f"zone{zone:02d}_{stroke_class.value.lower()}"


def _write_heatmaps(
    heatmaps: dict[tuple[int, StrokeClass], LandingHeatmap],
    out_dir: Path,
    config: AnalysisConfig,
    relative_to: Path,
    with_csv: bool = False,
) -> list[HeatmapRef]:
    grid = ZoneGrid(config.court.rows, config.court.cols)
    refs: list[HeatmapRef] = []
    for (zone, stroke_class), heatmap in heatmaps.items():
        normalized = normalize_heatmap(heatmap)
        path = out_dir / f"{_heatmap_name(zone, stroke_class)}.pgm"
        write_heatmap(normalized, path)
        if with_csv:
            write_heatmap(normalized, path.with_suffix(".csv"))
        refs.append(
            HeatmapRef(
                origin_zone=zone,
                stroke_class=stroke_class,
                path=path.relative_to(relative_to).as_posix(),
                most_probable_zone=most_probable_zone(normalized, grid),
                count=heatmap.count,
            )
        )
    return refs


def _print_stats(analyzer: SessionAnalyzer) -> None:
    s = analyzer.stats
    print("\n--- Statistics ---")
    print(f"Views: {s.views}")
    print(f"Frames: {s.frames}")
    print(f"Strokes segmented: {s.segments}")
    print("Classes: " + ", ".join(f"{k}={v}" for k, v in s.classes.items() if v))
    if s.empty_strokes:
        print(f"Strokes dropped (no usable angles): {s.empty_strokes}")
    if s.unknown_class:
        print(f"Strokes of classes missing from the envelope: {s.unknown_class}")
    if s.imu_windows_empty:
        print(f"Swings without IMU samples: {s.imu_windows_empty}")
    if s.landings_skipped:
        print(f"Landings skipped: {s.landings_skipped}")


def cmd_validate(args: argparse.Namespace, config: AnalysisConfig) -> int:
    manifest = _require(args.manifest, "manifest")
    _, _, _, report = SessionAnalyzer(config).load_and_validate(manifest)
    _print_validation(report)
    return EXIT_VALIDATION if report.failed else EXIT_OK


def cmd_build_ref(args: argparse.Namespace, config: AnalysisConfig) -> int:
    log = structlog.get_logger()
    manifests = [_require(m, "manifest") for m in args.manifests]
    analyzer = SessionAnalyzer(config)
    features = []
    for manifest in manifests:
        analysis = _analyze_or_refuse(analyzer, manifest)
        if analysis is None:
            return EXIT_VALIDATION
        features.extend(analysis.features)

    ref = config.reference
    model = build_envelope(features, ref.p_lo, ref.p_hi, ref.n_min)
    out = Path(args.out)
    save_envelope(model, out)
    log.info("build_ref_complete", sessions=len(manifests), strokes=len(features), out=str(out))
    for cls, angle, count in model.excluded:
        print(f"excluded {cls.value}/{angle}: {count} strokes (need {ref.n_min})")
    print(f"Envelope with {len(model.bands)} (class, angle) bands saved to {out}")
    _print_stats(analyzer)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, config: AnalysisConfig) -> int:
    manifest = _require(args.manifest, "manifest")
    model = load_envelope(args.envelope)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    analyzer = SessionAnalyzer(config)
    analysis = _analyze_or_refuse(analyzer, manifest)
    if analysis is None:
        return EXIT_VALIDATION

    scores, unknown = analyzer.score(analysis.features, model)
    heatmaps = analyzer.heatmaps(analysis.landings())
    refs = _write_heatmaps(heatmaps, out_dir / "heatmaps", config, out_dir)
    report = assemble_report(
        session_id=analysis.manifest.session_id,
        subject_id=analysis.manifest.subject_id,
        scores=scores,
        config=config,
        swings=analysis.swings,
        heatmaps=refs,
        validation_warnings=analysis.validation.warnings,
        unscored=unknown + analysis.dropped,
        recorded_at=analysis.manifest.recorded_at,
    )

    if args.format in ("json", "both"):
        (out_dir / "report.json").write_text(serialize_report(report), encoding="utf-8")
    if args.format in ("md", "both"):
        (out_dir / "report.md").write_text(
            render_markdown(report, config.report.severity_threshold), encoding="utf-8"
        )
    if args.dump:
        for view in analysis.views:
            first = view.frames[0].frame_index if view.frames else 0
            write_angle_dump(view.angles, first, out_dir / f"angles_{view.view.view_id}.csv")
        write_stroke_dump(analysis.features, out_dir / "strokes.csv")

    accuracy = "n/a" if report.overall_accuracy is None else f"{report.overall_accuracy:.2f}"
    print(f"Session {report.session_id}: accuracy {accuracy}, {len(report.faults)} faults")
    for i, fault in enumerate(report.top_faults[:3], start=1):
        print(f"  {i}. {fault.angle_name} on {fault.stroke_class.value}: {fault.severity:.2f} deg {fault.direction}")
    _print_stats(analyzer)
    print(f"\nSaved to: {out_dir}")
    return EXIT_OK


def cmd_heatmap(args: argparse.Namespace, config: AnalysisConfig) -> int:
    manifests = [_require(m, "manifest") for m in args.manifests]
    out_dir = Path(args.out)
    analyzer = SessionAnalyzer(config)
    observations: list[LandingObservation] = []
    for manifest in manifests:
        analysis = _analyze_or_refuse(analyzer, manifest)
        if analysis is None:
            return EXIT_VALIDATION
        observations.extend(analysis.landings())

    heatmaps = analyzer.heatmaps(observations)
    refs = _write_heatmaps(heatmaps, out_dir, config, out_dir, with_csv=True)
    write_json(
        {
            "heatmaps": [
                {
                    "origin_zone": r.origin_zone,
                    "stroke_class": r.stroke_class.value,
                    "path": r.path,
                    "most_probable_zone": r.most_probable_zone,
                    "count": r.count,
                }
                for r in refs
            ],
            "skipped": analyzer.stats.landings_skipped,
            "config": config.to_dict(),
        },
        out_dir / "heatmaps.json",
    )
    for r in refs:
        print(f"zone {r.origin_zone} {r.stroke_class.value}: {r.count} landings, most probable zone {r.most_probable_zone}")
    print(f"\nSaved to: {out_dir}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, config: AnalysisConfig) -> int:
    spec = load_fixture_spec(_require(args.spec, "fixture spec"))
    if config.seed is not None:
        spec.seed = config.seed
    session = generate_fixture_session(spec, args.out, config.sim)
    print(f"Fixture {spec.session_id}: {len(session.truth['strokes'])} strokes, {session.truth['frames']} frames")
    print(f"Saved to: {session.directory}")
    return EXIT_OK


def cmd_progress(args: argparse.Namespace, config: AnalysisConfig) -> int:
    reports = [load_report(_require(p, "report")) for p in args.reports]
    summary = compare_sessions(progress_track(reports))
    markdown = render_progress_markdown(summary)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.format in ("json", "both"):
            write_json(progress_to_dict(summary), out_dir / "progress.json")
        if args.format in ("md", "both"):
            (out_dir / "progress.md").write_text(markdown, encoding="utf-8")
        print(f"Saved to: {out_dir}")
    else:
        print(markdown, end="")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, config: AnalysisConfig) -> int:
    manifest = _require(args.manifest, "manifest")
    truth_path = _require(args.truth or manifest.parent / "truth.json", "truth sidecar")
    analysis = _analyze_or_refuse(SessionAnalyzer(config), manifest)
    if analysis is None:
        return EXIT_VALIDATION
    metrics = evaluate_detections(analysis.features, load_truth(truth_path), args.tolerance)
    print(dumps_canonical(metrics_to_dict(metrics)), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # Parent parser with global options (inherited by all subcommands)
    parent_parser = argparse.ArgumentParser(add_help=False)
    parent_parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Set logging level (default: LOG_LEVEL env var, else INFO)",
    )
    parent_parser.add_argument(
        "--log-format",
        choices=["console", "json"],
        default=None,
        help="Log renderer on stderr (default: LOG_FORMAT env var, else console)",
    )
    parent_parser.add_argument("--config", help="JSON config layered over the defaults (fallback: SHUTTLESENSE_CONFIG)")
    parent_parser.add_argument("--seed", type=int, help="Seed for every random stream (default: config seed, else the fixture spec's own)")

    parser = argparse.ArgumentParser(prog="shuttlesense", description="Badminton session assessment CLI")
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate_parser = subparsers.add_parser("validate", parents=[parent_parser], help="Check a session against the capture criteria")
    validate_parser.add_argument("manifest", help="Session manifest JSON")
    validate_parser.set_defaults(func=cmd_validate)

    ref_parser = subparsers.add_parser("build-ref", parents=[parent_parser], help="Build a reference envelope")
    ref_parser.add_argument("manifests", nargs="+", help="Reference session manifests")
    ref_parser.add_argument("--out", default="envelope.json", help="Envelope output path")
    ref_parser.set_defaults(func=cmd_build_ref)

    analyze_parser = subparsers.add_parser("analyze", parents=[parent_parser], help="Assess a trainee session")
    analyze_parser.add_argument("manifest", help="Trainee session manifest JSON")
    analyze_parser.add_argument("--envelope", required=True, help="Envelope from build-ref")
    analyze_parser.add_argument("--out", required=True, help="Output directory")
    analyze_parser.add_argument("--top-k", type=int, help="Faults shown in the report (default: config report.top_k)")
    analyze_parser.add_argument("--format", choices=["json", "md", "both"], default="both", help="Report formats")
    analyze_parser.add_argument("--dump", action="store_true", help="Also write angle and stroke CSV dumps")
    analyze_parser.set_defaults(func=cmd_analyze)

    heatmap_parser = subparsers.add_parser("heatmap", parents=[parent_parser], help="Landing heatmaps per origin zone and class")
    heatmap_parser.add_argument("manifests", nargs="+", help="Session manifests")
    heatmap_parser.add_argument("--out", required=True, help="Output directory")
    heatmap_parser.set_defaults(func=cmd_heatmap)

    simulate_parser = subparsers.add_parser("simulate", parents=[parent_parser], help="Generate a synthetic session")
    simulate_parser.add_argument("spec", help="Fixture spec JSON")
    simulate_parser.add_argument("--out", required=True, help="Session output directory")
    simulate_parser.set_defaults(func=cmd_simulate)

    progress_parser = subparsers.add_parser("progress", parents=[parent_parser], help="Compare reports across sessions")
    progress_parser.add_argument("reports", nargs="+", help="report.json files")
    progress_parser.add_argument("--out", help="Output directory (default: print markdown)")
    progress_parser.add_argument("--format", choices=["json", "md", "both"], default="both", help="Output formats")
    progress_parser.set_defaults(func=cmd_progress)

    evaluate_parser = subparsers.add_parser("evaluate", parents=[parent_parser], help="Score detection against a fixture's truth")
    evaluate_parser.add_argument("manifest", help="Fixture session manifest JSON")
    evaluate_parser.add_argument("--truth", help="Ground-truth sidecar (default: truth.json next to the manifest)")
    evaluate_parser.add_argument("--tolerance", type=int, default=3, help="Peak match tolerance in frames")
    evaluate_parser.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    log = structlog.get_logger()
    try:
        config = _build_config(args)
        return args.func(args, config)
    except UsageError as e:
        log.debug("usage_error", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        log.debug("data_error", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
