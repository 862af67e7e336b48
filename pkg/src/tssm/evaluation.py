"""IOU matching of detections against ground truth, and P/R/F1 metrics.

A detection counts as correct when its IOU with a ground-truth box
reaches the matching threshold (0.8 by default). Matching is greedy in
descending IOU and one-to-one; corpus metrics are micro-averaged from
summed tp/fp/fn.
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InvalidInputError, PageMismatchError
from .geometry import BBox, iou

log = logging.getLogger(__name__)

DEFAULT_IOU_THRESHOLD = 0.8
TABLE_KINDS = ("table",)
ALL_TABULAR_KINDS = ("table", "tabular_structure")
GROUNDTRUTH_KINDS = {"table", "tabular_structure", "figure", "formula"}

# One page's regions, for either side of the evaluation: (bbox, kind).
PageRegions = Sequence[tuple[BBox, str]]


@dataclass(frozen=True)
class GroundTruthPage:
    page: str
    regions: tuple[tuple[BBox, str], ...]


@dataclass
class MatchResult:
    """One-to-one assignment: (detection index, ground-truth index, iou)."""

    pairs: list[tuple[int, int, float]]
    unmatched_detections: list[int]
    unmatched_groundtruth: list[int]


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


def match_detections(
    dets: Sequence[BBox], gts: Sequence[BBox], iou_threshold: float = DEFAULT_IOU_THRESHOLD
) -> MatchResult:
    """Greedy descending-IOU one-to-one matching above the threshold.

    Candidate pairs are ordered by IOU and then by box coordinates, so the
    matched pairs do not depend on the input ordering of either list.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou threshold must be in (0, 1], got {iou_threshold}")
    candidates = []
    for di, det in enumerate(dets):
        for gi, gt in enumerate(gts):
            score = iou(det, gt)
            if score >= iou_threshold:
                candidates.append(
                    (-score, tuple(det.to_list()), tuple(gt.to_list()), di, gi)
                )
    candidates.sort()
    used_det: set[int] = set()
    used_gt: set[int] = set()
    pairs = []
    for neg_score, _, _, di, gi in candidates:
        if di in used_det or gi in used_gt:
            continue
        used_det.add(di)
        used_gt.add(gi)
        pairs.append((di, gi, -neg_score))
    return MatchResult(
        pairs=pairs,
        unmatched_detections=[i for i in range(len(dets)) if i not in used_det],
        unmatched_groundtruth=[i for i in range(len(gts)) if i not in used_gt],
    )


def metrics_from_counts(tp: int, fp: int, fn: int) -> Metrics:
    """P/R/F1 with total-order conventions for empty denominators.

    No claims means no false claims (precision 1); nothing to find means
    nothing missed (recall 1); F1 is 0 when precision + recall is 0.
    """
    precision = tp / (tp + fp) if tp + fp > 0 else 1.0
    recall = tp / (tp + fn) if tp + fn > 0 else 1.0
    denom = precision + recall
    f1 = 2.0 * precision * recall / denom if denom > 0 else 0.0
    return Metrics(tp, fp, fn, precision, recall, f1)


def compute_metrics(match: MatchResult, num_dets: int, num_gts: int) -> Metrics:
    tp = len(match.pairs)
    return metrics_from_counts(tp, num_dets - tp, num_gts - tp)


def evaluate_corpus(
    detections: Mapping[str, PageRegions],
    groundtruth: Mapping[str, PageRegions],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    kinds: Sequence[str] = TABLE_KINDS,
    strict: bool = False,
) -> Metrics:
    """Micro-averaged metrics over pages, restricted to the given kinds.

    Ground-truth pages with no detection entry count as empty detection
    sets. Detection pages missing from the ground truth are an error in
    strict mode and are skipped with a warning otherwise.
    """
    unknown = sorted(set(detections) - set(groundtruth))
    if unknown:
        if strict:
            raise PageMismatchError(
                f"detections reference pages absent from ground truth: {', '.join(unknown)}"
            )
        for page in unknown:
            log.warning("skipping detections for unknown page %r", page)
    wanted = set(kinds)
    tp = fp = fn = 0
    for page in sorted(groundtruth):
        det_boxes = [b for b, k in detections.get(page, []) if k in wanted]
        gt_boxes = [b for b, k in groundtruth[page] if k in wanted]
        match = match_detections(det_boxes, gt_boxes, iou_threshold)
        tp += len(match.pairs)
        fp += len(det_boxes) - len(match.pairs)
        fn += len(gt_boxes) - len(match.pairs)
    return metrics_from_counts(tp, fp, fn)


def _parse_page_object(obj, source: str) -> tuple[str, list[tuple[BBox, str]]]:
    if not isinstance(obj, dict) or "page" not in obj or "regions" not in obj:
        raise InvalidInputError(
            f"{source}: expected an object with 'page' and 'regions' keys"
        )
    regions = []
    for entry in obj["regions"]:
        try:
            bbox = BBox.from_list(entry["bbox"])
            kind = str(entry["kind"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"{source}: malformed region entry: {exc}") from exc
        if kind not in GROUNDTRUTH_KINDS:
            log.warning("%s: unrecognized region kind %r", source, kind)
        regions.append((bbox, kind))
    return str(obj["page"]), regions


def _load_json_pages(path: Path) -> dict[str, list[tuple[BBox, str]]]:
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    objects = data if isinstance(data, list) else [data]
    pages = {}
    for obj in objects:
        page, regions = _parse_page_object(obj, str(path))
        pages[page] = regions
    return pages


def voc_xml_to_page(path: str | Path) -> GroundTruthPage:
    """Convert one PASCAL-VOC-style XML annotation to the JSON page schema.

    Reads object name and bndbox corners; the page id comes from the
    annotation's filename element or, failing that, the file stem.
    """
    p = Path(path)
    try:
        root = ET.parse(p).getroot()
    except (OSError, ET.ParseError) as exc:
        raise InvalidInputError(f"cannot parse {p}: {exc}") from exc
    name_el = root.find("filename")
    page = Path(name_el.text).stem if name_el is not None and name_el.text else p.stem
    regions = []
    for obj in root.iter("object"):
        kind_el = obj.find("name")
        box_el = obj.find("bndbox")
        if kind_el is None or box_el is None or kind_el.text is None:
            raise InvalidInputError(f"{p}: object without name or bndbox")
        try:
            coords = [int(float(box_el.findtext(tag))) for tag in ("xmin", "ymin", "xmax", "ymax")]
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"{p}: malformed bndbox: {exc}") from exc
        regions.append((BBox.from_coords(*coords), kind_el.text.strip()))
    return GroundTruthPage(page, tuple(regions))


def load_regions(path: str | Path) -> dict[str, list[tuple[BBox, str]]]:
    """Load detection or ground-truth regions from a file or directory.

    Accepts a single JSON file (one page object or a list of them), a VOC
    XML file, or a directory of such files; a manifest.json listing is
    skipped when scanning a directory.
    """
    p = Path(path)
    if p.is_dir():
        pages: dict[str, list[tuple[BBox, str]]] = {}
        files = sorted(
            f for f in p.iterdir()
            if f.suffix in (".json", ".xml") and f.name != "manifest.json"
        )
        if not files:
            raise InvalidInputError(f"no region files found in {p}")
        for f in files:
            if f.suffix == ".xml":
                gt = voc_xml_to_page(f)
                pages[gt.page] = list(gt.regions)
            else:
                pages.update(_load_json_pages(f))
        return pages
    if not p.exists():
        raise InvalidInputError(f"cannot read {p}: no such file")
    if p.suffix == ".xml":
        gt = voc_xml_to_page(p)
        return {gt.page: list(gt.regions)}
    return _load_json_pages(p)
