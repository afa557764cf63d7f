"""
Command-line interface for neuromorph
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .api import MorphometryApi
from .core import EvaluationConfig, SynthConfig
from .core.config import parse_resolution
from .core.reports import percent
from .core.schemas import ImageFailure
from .core.synth import SceneError

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] [%(name)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def create_config(args: argparse.Namespace) -> EvaluationConfig:
    """Create EvaluationConfig from command line arguments"""
    return EvaluationConfig(
        threshold=getattr(args, "threshold", 0.5),
        connectivity=args.connectivity,
        resolution=parse_resolution(args.resize),
        per_image=getattr(args, "per_image", False),
        write_overlays=not getattr(args, "no_overlays", False),
        source_label=getattr(args, "source", "gt"),
        jobs=args.jobs,
        progress=not args.no_progress,
    )


def _report_failures(failures: Sequence[ImageFailure]) -> int:
    for failure in failures:
        print(f"❌ {failure.image_id}: {failure.reason}", file=sys.stderr)
    return EXIT_FAILURES if failures else EXIT_OK


def cmd_measure(args: argparse.Namespace) -> int:
    """Measure every annotated instance of every image."""
    api = MorphometryApi(create_config(args))
    summary = api.measure_directory(args.images, args.annotations, args.out)
    print(f"✅ Measured {len(summary.records)} instances")
    print(f"📄 Output saved to: {summary.output}")
    return _report_failures(summary.failures)


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Evaluate predictions against ground truth."""
    api = MorphometryApi(create_config(args))
    bundle = api.evaluate_directories(args.gt, args.pred, args.images, args.out)
    d = bundle.dataset
    print(f"✅ Evaluated {len(bundle.per_image)} images ({bundle.aggregation} aggregation)")
    print(f"   P={percent(d.precision)} R={percent(d.recall)} F1={percent(d.f1)} "
          f"SQ={percent(d.sq)} RQ={percent(d.rq)} PQ={percent(d.pq)}")
    if bundle.accuracy is not None:
        print(f"   Measurement accuracy (macro): {bundle.accuracy.overall_macro:.2f}")
    print(f"📄 Reports saved to: {args.out}")
    return _report_failures(bundle.failures)


def cmd_synth(args: argparse.Namespace) -> int:
    """Write a synthetic fixture corpus."""
    try:
        config = SynthConfig.model_validate_json(Path(args.config).read_text(encoding="utf-8"))
    except ValidationError as e:
        for err in e.errors():
            field = ".".join(str(part) for part in err["loc"]) or "<root>"
            print(f"❌ Invalid config field '{field}': {err['msg']}", file=sys.stderr)
        return EXIT_USAGE
    api = MorphometryApi(create_config(args))
    try:
        scene_ids = api.synthesize_corpus(config, args.out)
    except SceneError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_FAILURES
    print(f"✅ Wrote {len(scene_ids)} scenes")
    print(f"📄 Output saved to: {args.out}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="Output directory")
    parser.add_argument("--connectivity", type=int, choices=[4, 8], default=8,
                        help="Pixel adjacency for splitting raster predictions")
    parser.add_argument("--resize", default="640x640",
                        help="Working resolution WxH, or 'none' for native size")
    parser.add_argument("--jobs", type=int, default=1, help="Images processed in parallel")
    parser.add_argument("--no-progress", action="store_true", help="Hide progress bars")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neuromorph",
        description="neuromorph - instance segmentation evaluation and cell morphometry",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s measure images/ gt/ --out reports/
  %(prog)s evaluate gt/ pred/ images/ --out reports/ --threshold 0.5
  %(prog)s synth corpus.json --out fixtures/
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command")

    # measure
    measure_parser = subparsers.add_parser("measure", help="Measure annotated instances")
    measure_parser.add_argument("images", help="Directory of PGM/PNG images")
    measure_parser.add_argument("annotations", help="Directory of annotation JSON files")
    measure_parser.add_argument("--source", default="gt", help="Value of the CSV 'source' column")
    _add_common(measure_parser)
    measure_parser.set_defaults(func=cmd_measure)

    # evaluate
    evaluate_parser = subparsers.add_parser("evaluate", help="Evaluate predictions against ground truth")
    evaluate_parser.add_argument("gt", help="Directory of ground-truth annotation files")
    evaluate_parser.add_argument("pred", help="Directory of prediction files")
    evaluate_parser.add_argument("images", help="Directory of PGM/PNG images")
    evaluate_parser.add_argument("--threshold", type=float, default=0.5,
                                 help="IoU a pair must exceed to match")
    evaluate_parser.add_argument("--per-image", action="store_true",
                                 help="Average metrics over images instead of pooling counts")
    evaluate_parser.add_argument("--no-overlays", action="store_true", help="Skip overlay PNGs")
    _add_common(evaluate_parser)
    evaluate_parser.set_defaults(func=cmd_evaluate)

    # synth
    synth_parser = subparsers.add_parser("synth", help="Generate a synthetic fixture corpus")
    synth_parser.add_argument("config", help="Corpus JSON (scenes, scene, optional perturb)")
    _add_common(synth_parser)
    synth_parser.set_defaults(func=cmd_synth)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    configure_logging(args.log_level)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
