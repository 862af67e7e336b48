"""Raster page analysis: binarization, components, text lines, candidates.

Turns a grayscale page into character-level connected components, groups
them into text lines, estimates the typical character width, and proposes
vertically cohesive line blocks as candidate tabular regions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import InvalidInputError, NoContentError
from .geometry import BBox, reading_order_key, union_bbox
from .rows import SubElement

log = logging.getLogger(__name__)

# Rec. 601 luminance weights for RGB input.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

# Long thin strokes (rules, axis lines) are set aside before line building.
RULING_ASPECT = 20.0

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

DEFAULT_NOISE_MIN_AREA = 4
DEFAULT_GAP_FACTOR = 1.8
DEFAULT_LINE_OVERLAP = 0.4


@dataclass
class GrayImage:
    """8-bit luminance raster, shape (height, width) row-major."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.pixels.ndim != 2:
            raise InvalidInputError(f"expected a 2-d image, got shape {self.pixels.shape}")
        if self.pixels.dtype != np.uint8:
            raise InvalidInputError(f"expected uint8 samples, got {self.pixels.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def samples(self) -> np.ndarray:
        return self.pixels.ravel()


@dataclass
class BinaryImage:
    """Ink mask matching a source image; True marks ink."""

    mask: np.ndarray

    def __post_init__(self) -> None:
        if self.mask.ndim != 2 or self.mask.dtype != np.bool_:
            raise InvalidInputError("binary image must be a 2-d boolean mask")

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]


@dataclass(frozen=True)
class TextLine:
    """One physical text line; components ordered left to right."""

    bbox: BBox
    components: tuple[SubElement, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("text line with no components")


@dataclass(frozen=True)
class CandidateRegion:
    """Vertically cohesive block of text lines, ordered top to bottom."""

    bbox: BBox
    lines: tuple[TextLine, ...]

    def __post_init__(self) -> None:
        if not self.lines:
            raise ValueError("candidate region with no lines")


@dataclass
class PageAnalysis:
    """Everything the detector needs from one page."""

    binary: BinaryImage
    components: list[SubElement]
    rulings: list[SubElement]
    char_width: float | None
    lines: list[TextLine]
    candidates: list[CandidateRegion]


def load_image(path: str | Path) -> GrayImage:
    """Read a PNG or PGM (P5) page as 8-bit luminance.

    RGB input is converted with the Rec. 601 weights; other modes go
    through Pillow's RGB conversion first.
    """
    p = Path(path)
    try:
        with Image.open(p) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
            else:
                if im.mode != "RGB":
                    im = im.convert("RGB")
                rgb = np.asarray(im, dtype=np.float64)
                arr = np.clip(np.rint(rgb @ _LUMA_WEIGHTS), 0, 255).astype(np.uint8)
    except FileNotFoundError:
        raise InvalidInputError(f"cannot read image: {p}") from None
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot decode image {p}: {exc}") from exc
    return GrayImage(arr)


def otsu_ink_threshold(pixels: np.ndarray) -> int:
    """Threshold T such that pixels < T are ink; 0 means no ink at all.

    Maximizes the between-class variance of the luminance histogram. A
    fully uniform image has no foreground and yields T = 0.
    """
    if pixels.size == 0:
        raise InvalidInputError("zero-dimension image")
    flat = pixels.ravel()
    if flat.min() == flat.max():
        return 0
    hist = np.bincount(flat, minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    w1 = total - w0
    cum_mass = np.cumsum(hist * levels)
    mass = cum_mass[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = np.where(w0 > 0, cum_mass / w0, 0.0)
        mu1 = np.where(w1 > 0, (mass - cum_mass) / w1, 0.0)
    between = np.where((w0 > 0) & (w1 > 0), w0 * w1 * (mu0 - mu1) ** 2, 0.0)
    return int(np.argmax(between)) + 1


def binarize(img: GrayImage) -> BinaryImage:
    """Global-threshold ink mask; uniform pages come back all background."""
    if img.pixels.size == 0:
        raise InvalidInputError("zero-dimension image")
    t = otsu_ink_threshold(img.pixels)
    return BinaryImage(img.pixels < t)


def connected_components(
    binary: BinaryImage, noise_min_area: int = DEFAULT_NOISE_MIN_AREA
) -> list[SubElement]:
    """8-connected ink components as bounding boxes, in reading order.

    Components with fewer than noise_min_area ink pixels are dropped as
    scanner speckle.
    """
    labels, count = ndimage.label(binary.mask, structure=_EIGHT_CONNECTED)
    if count == 0:
        return []
    areas = np.bincount(labels.ravel())
    out = []
    for index, slc in enumerate(ndimage.find_objects(labels), start=1):
        if slc is None or areas[index] < noise_min_area:
            continue
        ys, xs = slc
        out.append(SubElement(BBox.from_coords(xs.start, ys.start, xs.stop, ys.stop)))
    out.sort(key=lambda s: reading_order_key(s.bbox))
    return out


def split_rulings(
    components: Sequence[SubElement], aspect_threshold: float = RULING_ASPECT
) -> tuple[list[SubElement], list[SubElement]]:
    """Separate long thin strokes from text-like components."""
    text: list[SubElement] = []
    rulings: list[SubElement] = []
    for comp in components:
        w, h = comp.bbox.width, comp.bbox.height
        if max(w / h, h / w) > aspect_threshold:
            rulings.append(comp)
        else:
            text.append(comp)
    return text, rulings


def estimate_char_width(components: Sequence[SubElement]) -> float:
    """Typical component width: median after dropping gross outliers.

    Widths above 3x the raw median (merged words, rules) are discarded
    before the final median.
    """
    if not components:
        raise NoContentError("no components to estimate character width from")
    widths = np.array([c.bbox.width for c in components], dtype=np.float64)
    med = np.median(widths)
    kept = widths[widths <= 3.0 * med]
    return float(np.median(kept))


def segment_lines(
    components: Sequence[SubElement], overlap_ratio: float = DEFAULT_LINE_OVERLAP
) -> list[TextLine]:
    """Greedy reading-order clustering of components into text lines.

    A component joins the open line whose y-extent overlaps its own by at
    least overlap_ratio of the smaller height, preferring the largest
    overlap; otherwise it opens a new line.
    """
    open_lines: list[dict] = []
    ordered = sorted(components, key=lambda s: reading_order_key(s.bbox))
    for comp in ordered:
        cy0, cy1 = comp.bbox.tl.y, comp.bbox.br.y
        best = None
        best_ratio = 0.0
        for line in open_lines:
            ov = min(cy1, line["y1"]) - max(cy0, line["y0"])
            if ov <= 0:
                continue
            ratio = ov / min(cy1 - cy0, line["y1"] - line["y0"])
            if ratio >= overlap_ratio and ratio > best_ratio:
                best = line
                best_ratio = ratio
        if best is None:
            open_lines.append({"y0": cy0, "y1": cy1, "members": [comp]})
        else:
            best["members"].append(comp)
            best["y0"] = min(best["y0"], cy0)
            best["y1"] = max(best["y1"], cy1)
    lines = []
    for entry in open_lines:
        members = tuple(
            sorted(entry["members"], key=lambda s: (s.bbox.tl.x, s.bbox.tl.y))
        )
        lines.append(TextLine(union_bbox(m.bbox for m in members), members))
    lines.sort(key=lambda l: reading_order_key(l.bbox))
    return lines


def propose_candidate_regions(
    lines: Sequence[TextLine], gap_factor: float = DEFAULT_GAP_FACTOR
) -> list[CandidateRegion]:
    """Maximal runs of vertically consecutive lines with small gaps.

    The gap budget is gap_factor times the median line height; every line
    lands in exactly one candidate, single-line candidates included.
    """
    if not lines:
        return []
    ordered = sorted(lines, key=lambda l: reading_order_key(l.bbox))
    median_height = float(np.median([l.bbox.height for l in ordered]))
    max_gap = gap_factor * median_height
    candidates = []
    run = [ordered[0]]
    for line in ordered[1:]:
        if line.bbox.tl.y - run[-1].bbox.br.y > max_gap:
            candidates.append(CandidateRegion(union_bbox(l.bbox for l in run), tuple(run)))
            run = []
        run.append(line)
    candidates.append(CandidateRegion(union_bbox(l.bbox for l in run), tuple(run)))
    return candidates


def analyze_page(
    image: GrayImage,
    *,
    noise_min_area: int = DEFAULT_NOISE_MIN_AREA,
    gap_factor: float = DEFAULT_GAP_FACTOR,
    line_overlap: float = DEFAULT_LINE_OVERLAP,
) -> PageAnalysis:
    """Full single-page analysis; deterministic for identical image bytes."""
    binary = binarize(image)
    components = connected_components(binary, noise_min_area)
    text, rulings = split_rulings(components)
    if not text:
        return PageAnalysis(binary, components, rulings, None, [], [])
    char_width = estimate_char_width(text)
    lines = segment_lines(text, line_overlap)
    candidates = propose_candidate_regions(lines, gap_factor)
    log.debug(
        "page analysis: %d components (%d rulings), char width %.2f, %d lines, %d candidates",
        len(components), len(rulings), char_width, len(lines), len(candidates),
    )
    return PageAnalysis(binary, components, rulings, char_width, lines, candidates)
