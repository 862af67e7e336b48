"""Tabular-region decisions over candidate regions, plus table refinement.

A candidate qualifies as a tabular structure when enough of its adjacent
row pairs are structurally similar; the emitted region is the longest run
of consecutive mutually similar rows. Refinement promotes structures with
a real column layout to tables, unless they sit inside a plot-style axis
frame built from ruling strokes.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidConfigError
from .geometry import BBox, intersection_area, reading_order_key, union_bbox
from .page import (
    CandidateRegion,
    GrayImage,
    PageAnalysis,
    analyze_page,
)
from .rows import RowElement, SubElement, row_feature
from .similarity import SimilarityMatrix, pairwise_tssm

log = logging.getLogger(__name__)

KIND_TABLE = "table"
KIND_TABULAR_STRUCTURE = "tabular_structure"

# Axis-frame reconstruction: rulings pair up when this close, and a frame
# made of few rulings is read as a plot frame rather than a table grid.
AXIS_FRAME_PROXIMITY = 8
AXIS_FRAME_MAX_RULINGS = 6
ENCLOSURE_FRACTION = 0.95


@dataclass(frozen=True)
class DetectionConfig:
    """Pipeline knobs; every field maps 1:1 onto the flat JSON config."""

    th_w_factor: float = 2.0
    th_w_abs: float | None = None
    th_sim: float = 0.8
    min_rows: int = 3
    adj_fraction: float = 0.7
    min_columns: int = 2
    gap_factor: float = 1.8
    noise_min_area: int = 4
    line_overlap: float = 0.4
    all_pairs: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.th_sim <= 1.0:
            raise InvalidConfigError(f"th_sim must be in [0, 1], got {self.th_sim}")
        if not 0.0 < self.adj_fraction <= 1.0:
            raise InvalidConfigError(
                f"adj_fraction must be in (0, 1], got {self.adj_fraction}"
            )
        if self.min_rows < 2:
            raise InvalidConfigError(f"min_rows must be >= 2, got {self.min_rows}")
        if self.th_w_factor <= 0:
            raise InvalidConfigError(f"th_w_factor must be > 0, got {self.th_w_factor}")
        if self.th_w_abs is not None and self.th_w_abs < 0:
            raise InvalidConfigError(f"th_w_abs must be >= 0, got {self.th_w_abs}")
        if self.min_columns < 1:
            raise InvalidConfigError(f"min_columns must be >= 1, got {self.min_columns}")
        if self.gap_factor <= 0:
            raise InvalidConfigError(f"gap_factor must be > 0, got {self.gap_factor}")
        if self.noise_min_area < 0:
            raise InvalidConfigError(
                f"noise_min_area must be >= 0, got {self.noise_min_area}"
            )
        if not 0.0 < self.line_overlap <= 1.0:
            raise InvalidConfigError(
                f"line_overlap must be in (0, 1], got {self.line_overlap}"
            )

    @classmethod
    def from_dict(cls, data: Mapping, base: "DetectionConfig | None" = None) -> "DetectionConfig":
        """Build from a flat mapping; unknown keys are rejected."""
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise InvalidConfigError(f"unknown config key: {key!r}")
        merged = dataclasses.asdict(base) if base is not None else {}
        merged.update(data)
        return cls(**merged)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def gap_threshold(self, char_width: float) -> float:
        """Effective white-space threshold: absolute override or factor * width."""
        if self.th_w_abs is not None:
            return self.th_w_abs
        return self.th_w_factor * char_width


@dataclass(eq=False)
class TabularRegion:
    """A detected region with its rows and pairwise similarity statistics."""

    bbox: BBox
    rows: tuple[RowElement, ...]
    similarity: SimilarityMatrix
    kind: str
    score: float

    def to_json(self) -> dict:
        return {
            "bbox": self.bbox.to_list(),
            "kind": self.kind,
            "score": self.score,
            "rows": len(self.rows),
        }


def build_row_elements(
    candidate: CandidateRegion, char_width: float, cfg: DetectionConfig
) -> list[RowElement]:
    """One row per line, all framed to the candidate's shared x-extent.

    The shared frame gives every row the same partition count, so rows of
    visually different widths stay comparable.
    """
    threshold = cfg.gap_threshold(char_width)
    x0, x1 = candidate.bbox.tl.x, candidate.bbox.br.x
    return [
        RowElement.build(
            BBox.from_coords(x0, line.bbox.tl.y, x1, line.bbox.br.y),
            line.components,
            char_width,
            threshold,
        )
        for line in candidate.lines
    ]


def score_region(
    rows: Sequence[RowElement], threshold: float, all_pairs: bool = False
) -> tuple[SimilarityMatrix, float, float]:
    """Similarity matrix plus the similar-pair fraction and mean score.

    By default the fraction counts adjacent row pairs, which tolerates a
    single header row; with all_pairs it counts every unordered pair.
    The mean is always over adjacent pairs.
    """
    if len(rows) < 2:
        raise ValueError("cannot score a region with fewer than 2 rows")
    matrix = pairwise_tssm([row_feature(r) for r in rows])
    adjacent = matrix.adjacent_scores()
    if all_pairs:
        upper = matrix.values[np.triu_indices(matrix.size, k=1)]
        fraction = float(np.mean(upper >= threshold))
    else:
        fraction = float(np.mean(adjacent >= threshold))
    return matrix, fraction, float(adjacent.mean())


def _longest_similar_run(matrix: SimilarityMatrix, threshold: float) -> tuple[int, int]:
    """Inclusive row range of the longest run of similar adjacent pairs."""
    flags = matrix.adjacent_scores() >= threshold
    best = (0, 0)
    start = 0
    for i, flag in enumerate(flags):
        if not flag:
            start = i + 1
            continue
        if (i + 1) - start > best[1] - best[0]:
            best = (start, i + 1)
    return best


def detect_tabular_regions(
    image: GrayImage,
    cfg: DetectionConfig = DetectionConfig(),
    analysis: PageAnalysis | None = None,
) -> list[TabularRegion]:
    """Run the page pipeline and keep candidates with similar rows.

    A candidate is emitted when it has at least min_rows lines and the
    similar-pair fraction reaches adj_fraction; the emitted region is
    trimmed to the longest run of consecutive similar rows, which sharpens
    boundaries that candidate proposal over-grows. Blank pages give an
    empty list.
    """
    if analysis is None:
        analysis = analyze_page(
            image,
            noise_min_area=cfg.noise_min_area,
            gap_factor=cfg.gap_factor,
            line_overlap=cfg.line_overlap,
        )
    if analysis.char_width is None:
        return []
    regions = []
    for candidate in analysis.candidates:
        if len(candidate.lines) < cfg.min_rows:
            continue
        rows = build_row_elements(candidate, analysis.char_width, cfg)
        matrix, fraction, _ = score_region(rows, cfg.th_sim, cfg.all_pairs)
        if fraction < cfg.adj_fraction:
            continue
        lo, hi = _longest_similar_run(matrix, cfg.th_sim)
        if hi - lo + 1 < cfg.min_rows:
            continue
        kept_rows = tuple(rows[lo : hi + 1])
        kept_lines = candidate.lines[lo : hi + 1]
        sub = matrix.values[lo : hi + 1, lo : hi + 1].copy()
        score = float(sub.diagonal(1).mean())
        regions.append(
            TabularRegion(
                bbox=union_bbox(l.bbox for l in kept_lines),
                rows=kept_rows,
                similarity=SimilarityMatrix(len(kept_rows), sub),
                kind=KIND_TABULAR_STRUCTURE,
                score=score,
            )
        )
    regions.sort(key=lambda r: reading_order_key(r.bbox))
    return regions


def _near(a: BBox, b: BBox, tol: int) -> bool:
    return (
        a.tl.x - tol < b.br.x
        and b.tl.x - tol < a.br.x
        and a.tl.y - tol < b.br.y
        and b.tl.y - tol < a.br.y
    )


def axis_frames(rulings: Sequence[SubElement]) -> list[tuple[BBox, int]]:
    """Plot-style frames reconstructed from ruling strokes.

    Every horizontal/vertical ruling pair that meets (within a small
    tolerance, so frames with open corners still register) spans a frame;
    overlapping frames merge. Returns (frame box, contributing rulings).
    """
    horizontal = [r.bbox for r in rulings if r.bbox.width >= r.bbox.height]
    vertical = [r.bbox for r in rulings if r.bbox.width < r.bbox.height]
    frames: list[tuple[BBox, set]] = []
    for hi, h in enumerate(horizontal):
        for vi, v in enumerate(vertical):
            if _near(h, v, AXIS_FRAME_PROXIMITY):
                frames.append((union_bbox([h, v]), {("h", hi), ("v", vi)}))
    merged = True
    while merged:
        merged = False
        for i in range(len(frames)):
            for j in range(i + 1, len(frames)):
                if intersection_area(frames[i][0], frames[j][0]) > 0:
                    frames[i] = (
                        union_bbox([frames[i][0], frames[j][0]]),
                        frames[i][1] | frames[j][1],
                    )
                    del frames[j]
                    merged = True
                    break
            if merged:
                break
    return [(box, len(members)) for box, members in frames]


def refine_tables(
    regions: Sequence[TabularRegion],
    cfg: DetectionConfig = DetectionConfig(),
    rulings: Sequence[SubElement] = (),
) -> list[TabularRegion]:
    """Relabel structures as tables; never alters boxes or drops regions.

    Promotion needs a column layout: at least half the rows must have
    min_columns or more horizontal regions. A structure enclosed in an
    axis frame (a sparse ruling frame, e.g. a chart border) stays a
    tabular structure: such regions are legitimate structures inside
    figures, not document tables.
    """
    frames = axis_frames(rulings)
    out = []
    for region in regions:
        rows_with_columns = sum(
            1 for row in region.rows if len(row.regions) >= cfg.min_columns
        )
        has_columns = 2 * rows_with_columns >= len(region.rows)
        enclosed = any(
            count <= AXIS_FRAME_MAX_RULINGS
            and intersection_area(region.bbox, frame)
            >= ENCLOSURE_FRACTION * region.bbox.area
            for frame, count in frames
        )
        kind = KIND_TABLE if has_columns and not enclosed else KIND_TABULAR_STRUCTURE
        out.append(dataclasses.replace(region, kind=kind))
    return out


def detect_and_refine(
    image: GrayImage, cfg: DetectionConfig = DetectionConfig()
) -> list[TabularRegion]:
    """Full per-page pipeline: analysis, detection, table refinement."""
    analysis = analyze_page(
        image,
        noise_min_area=cfg.noise_min_area,
        gap_factor=cfg.gap_factor,
        line_overlap=cfg.line_overlap,
    )
    regions = detect_tabular_regions(image, cfg, analysis=analysis)
    return refine_tables(regions, cfg, rulings=analysis.rulings)
