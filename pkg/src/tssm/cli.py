"""Command-line front end: detect, eval, and synth subcommands.

Exit codes: 0 success, 2 bad arguments or config, 3 unreadable or
undecodable input, 4 unwritable output, 5 strict-mode page mismatch.
The TSSM_LOG environment variable (error|warn|info|debug) sets verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from PIL import Image, ImageDraw

from .detector import KIND_TABLE, DetectionConfig, detect_and_refine
from .errors import (
    InvalidConfigError,
    InvalidInputError,
    NoContentError,
    PageMismatchError,
)
from .evaluation import (
    ALL_TABULAR_KINDS,
    DEFAULT_IOU_THRESHOLD,
    TABLE_KINDS,
    evaluate_corpus,
    load_regions,
)
from .page import load_image
from .synth import generate_corpus

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".pgm", ".ppm")

# Overlay colors (RGB), kept visually distinct per region kind.
OVERLAY_COLORS = {
    KIND_TABLE: (0, 128, 0),
    "tabular_structure": (255, 165, 0),
}

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

_CONFIG_FLAGS = (
    "th_w_factor",
    "th_w_abs",
    "th_sim",
    "min_rows",
    "adj_fraction",
    "min_columns",
    "gap_factor",
    "noise_min_area",
    "line_overlap",
)


def _configure_logging() -> None:
    level_name = os.environ.get("TSSM_LOG", "warn").lower()
    level = _LOG_LEVELS.get(level_name)
    if level is None:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if level_name not in _LOG_LEVELS and "TSSM_LOG" in os.environ:
        log.warning("unknown TSSM_LOG value %r, using warn", level_name)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tssm",
        description="Detect tabular structures in document images by row similarity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="detect tabular regions in images")
    detect.add_argument("--input", required=True, help="image file or directory")
    detect.add_argument("--config", help="JSON config file (flat detection settings)")
    detect.add_argument("--out", help="output JSON path (default: stdout)")
    detect.add_argument("--overlay", help="directory for PNGs with regions drawn in")
    detect.add_argument(
        "--tables-only", action="store_true", help="report only kind=table regions"
    )
    detect.add_argument(
        "--jobs", type=_positive_int, default=None,
        help="worker processes for directory input (default: logical CPUs)",
    )
    detect.add_argument("--th-w-factor", type=float, default=None, dest="th_w_factor")
    detect.add_argument("--th-w-abs", type=float, default=None, dest="th_w_abs")
    detect.add_argument("--th-sim", type=float, default=None, dest="th_sim")
    detect.add_argument("--min-rows", type=int, default=None, dest="min_rows")
    detect.add_argument("--adj-fraction", type=float, default=None, dest="adj_fraction")
    detect.add_argument("--min-columns", type=int, default=None, dest="min_columns")
    detect.add_argument("--gap-factor", type=float, default=None, dest="gap_factor")
    detect.add_argument(
        "--noise-min-area", type=int, default=None, dest="noise_min_area"
    )
    detect.add_argument("--line-overlap", type=float, default=None, dest="line_overlap")
    detect.add_argument(
        "--all-pairs", action=argparse.BooleanOptionalAction, default=None,
        dest="all_pairs", help="gate on all row pairs instead of adjacent ones",
    )
    detect.set_defaults(func=cmd_detect)

    evaluate = sub.add_parser("eval", help="score detections against ground truth")
    evaluate.add_argument("--detections", required=True, help="detection JSON file")
    evaluate.add_argument(
        "--groundtruth", required=True,
        help="ground-truth JSON/XML file or directory",
    )
    evaluate.add_argument(
        "--iou-threshold", type=float, default=DEFAULT_IOU_THRESHOLD
    )
    evaluate.add_argument(
        "--strict", action="store_true",
        help="fail on detection pages missing from the ground truth",
    )
    evaluate.add_argument("--report", help="also write metrics as JSON")
    evaluate.add_argument(
        "--all-tabular", action="store_true",
        help="count tabular structures as well as tables",
    )
    evaluate.set_defaults(func=cmd_eval)

    synth = sub.add_parser("synth", help="generate a synthetic corpus")
    synth.add_argument("--pages", type=_positive_int, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument(
        "--noise", type=float, default=0.0, help="salt-and-pepper flip rate"
    )
    synth.set_defaults(func=cmd_synth)
    return parser


def _load_config(args: argparse.Namespace) -> DetectionConfig:
    """Defaults, then the config file, then command-line flags."""
    cfg = DetectionConfig()
    if args.config:
        path = Path(args.config)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise InvalidConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidConfigError(f"config {path} must be a flat JSON object")
        cfg = DetectionConfig.from_dict(data, base=cfg)
    overrides = {
        name: getattr(args, name)
        for name in (*_CONFIG_FLAGS, "all_pairs")
        if getattr(args, name) is not None
    }
    if overrides:
        cfg = DetectionConfig.from_dict(overrides, base=cfg)
    return cfg


def _input_paths(spec: str) -> list[Path]:
    path = Path(spec)
    if path.is_dir():
        paths = sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        if not paths:
            raise InvalidInputError(f"no images found in {path}")
        return paths
    if not path.exists():
        raise InvalidInputError(f"cannot read input: {path}")
    return [path]


def _detect_page_job(job: tuple[str, DetectionConfig, bool, str | None]) -> dict:
    path, cfg, tables_only, overlay_dir = job
    image = load_image(path)
    regions = detect_and_refine(image, cfg)
    if tables_only:
        regions = [r for r in regions if r.kind == KIND_TABLE]
    if overlay_dir is not None:
        _write_overlay(Path(path), image, regions, Path(overlay_dir))
    return {"page": Path(path).stem, "regions": [r.to_json() for r in regions]}


def _write_overlay(src: Path, image, regions, overlay_dir: Path) -> None:
    rgb = Image.fromarray(image.pixels, mode="L").convert("RGB")
    draw = ImageDraw.Draw(rgb)
    for region in regions:
        color = OVERLAY_COLORS.get(region.kind, (255, 0, 0))
        x0, y0, x1, y1 = region.bbox.to_list()
        draw.rectangle([x0, y0, x1 - 1, y1 - 1], outline=color, width=3)
    rgb.save(overlay_dir / f"{src.stem}.png")


def cmd_detect(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    paths = _input_paths(args.input)
    batch = Path(args.input).is_dir()
    overlay_dir = None
    if args.overlay:
        overlay_dir = Path(args.overlay)
        overlay_dir.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    work = [
        (str(p), cfg, args.tables_only, str(overlay_dir) if overlay_dir else None)
        for p in paths
    ]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_detect_page_job, work))
    else:
        results = [_detect_page_job(item) for item in work]
    results.sort(key=lambda r: r["page"])
    payload = results if batch else results[0]
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    detections = load_regions(args.detections)
    groundtruth = load_regions(args.groundtruth)
    kinds = ALL_TABULAR_KINDS if args.all_tabular else TABLE_KINDS
    metrics = evaluate_corpus(
        detections,
        groundtruth,
        iou_threshold=args.iou_threshold,
        kinds=kinds,
        strict=args.strict,
    )
    print(f"tp {metrics.tp} fp {metrics.fp} fn {metrics.fn}")
    print(
        f"precision {metrics.precision:.6f} "
        f"recall {metrics.recall:.6f} f1 {metrics.f1:.6f}"
    )
    if args.report:
        report = {
            "tp": metrics.tp,
            "fp": metrics.fp,
            "fn": metrics.fn,
            "precision": metrics.precision,
            "recall": metrics.recall,
            "f1": metrics.f1,
            "iou_threshold": args.iou_threshold,
            "kinds": list(kinds),
        }
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    if not 0.0 <= args.noise < 1.0:
        raise InvalidConfigError(f"noise rate must be in [0, 1), got {args.noise}")
    entries = generate_corpus(args.pages, args.seed, args.out, noise_rate=args.noise)
    tables = sum(e["table_count"] for e in entries)
    print(f"wrote {len(entries)} pages ({tables} tables) to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidInputError, NoContentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PageMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
