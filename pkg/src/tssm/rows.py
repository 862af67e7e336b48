"""Row decomposition of candidate regions and horizontal-coverage features.

A row is framed to the full horizontal extent of its enclosing candidate
region and split into ``num_partitions`` equal vertical blocks, each about
one character width wide. Content is grouped into horizontal regions (gap
above threshold starts a new group); the feature of a row is, per
partition, the fraction of that partition horizontally covered by content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidConfigError
from .geometry import BBox, length, union_bbox


@dataclass(frozen=True)
class SubElement:
    """Primitive content unit, e.g. one character's connected component."""

    bbox: BBox


@dataclass(frozen=True)
class HorizontalRegion:
    """Maximal run of sub-elements separated by gaps below a threshold."""

    members: tuple[SubElement, ...]
    bbox: BBox

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("horizontal region with no members")


@dataclass(frozen=True)
class FeatureVector:
    """Per-partition coverage values of one row."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(v < 0.0 or not math.isfinite(v) for v in self.values):
            raise ValueError("feature entries must be finite and non-negative")

    @classmethod
    def zeros(cls, n: int) -> "FeatureVector":
        return cls((0.0,) * n)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)


def split_horizontal_regions(
    subelements: Iterable[SubElement], gap_threshold: float
) -> list[HorizontalRegion]:
    """Group sub-elements left to right; a gap > gap_threshold splits.

    The gap is measured from the running right edge of the open group, so
    nested or overlapping sub-elements always stay in one group and the
    resulting region boxes are pairwise disjoint in x. With threshold 0
    every strictly positive gap splits, which recovers the primitive
    units used for coverage computation.
    """
    if gap_threshold < 0:
        raise InvalidConfigError(f"gap threshold must be >= 0, got {gap_threshold}")
    ordered = sorted(subelements, key=lambda s: (s.bbox.tl.x, s.bbox.br.x))
    regions: list[HorizontalRegion] = []
    group: list[SubElement] = []
    right = 0
    for sub in ordered:
        if group and sub.bbox.tl.x - right > gap_threshold:
            regions.append(HorizontalRegion(tuple(group), union_bbox(g.bbox for g in group)))
            group = []
            right = 0
        group.append(sub)
        right = max(right, sub.bbox.br.x)
    if group:
        regions.append(HorizontalRegion(tuple(group), union_bbox(g.bbox for g in group)))
    return regions


def partition_count(length_px: float, char_width: float) -> int:
    """Number of vertical blocks: length over character width, rounded.

    Rounds half up with a floor of 1 so partitions stay close to one
    character width for any real page.
    """
    if char_width <= 0:
        raise InvalidConfigError(f"character width must be > 0, got {char_width}")
    if length_px <= 0:
        raise ValueError(f"length must be > 0, got {length_px}")
    return max(1, math.floor(length_px / char_width + 0.5))


@dataclass(frozen=True)
class RowElement:
    """One row of a candidate region.

    ``frame`` carries the candidate's shared x-extent and this row's own
    y-extent, so all rows of a region share the same partition count.
    """

    frame: BBox
    regions: tuple[HorizontalRegion, ...]
    num_partitions: int
    char_width: float

    def __post_init__(self) -> None:
        expected = partition_count(length(self.frame), self.char_width)
        if self.num_partitions != expected:
            raise ValueError(
                f"partition count {self.num_partitions} inconsistent with "
                f"frame width {length(self.frame)} / char width {self.char_width}"
            )

    @classmethod
    def build(
        cls,
        frame: BBox,
        subelements: Iterable[SubElement],
        char_width: float,
        gap_threshold: float,
    ) -> "RowElement":
        regions = split_horizontal_regions(subelements, gap_threshold)
        n = partition_count(length(frame), char_width)
        return cls(frame, tuple(regions), n, char_width)


def partition_edges(frame: BBox, count: int) -> np.ndarray:
    """count + 1 partition boundaries, equally spaced in real arithmetic."""
    return np.linspace(frame.tl.x, frame.br.x, count + 1)


def column_feature(row: RowElement, col: HorizontalRegion) -> FeatureVector:
    """Per-partition fraction of the row frame covered by one region.

    The region is re-split with a zero gap threshold first, so touching
    or overlapping members merge into single units and coverage is never
    double counted; every entry lies in [0, 1].
    """
    n = row.num_partitions
    edges = partition_edges(row.frame, n)
    part_width = length(row.frame) / n
    cover = np.zeros(n, dtype=np.float64)
    for unit in split_horizontal_regions(col.members, 0.0):
        a = unit.bbox.tl.x
        b = unit.bbox.br.x
        cover += np.clip(np.minimum(edges[1:], b) - np.maximum(edges[:-1], a), 0.0, None)
    return FeatureVector(tuple(cover / part_width))


def row_feature(row: RowElement) -> FeatureVector:
    """Element-wise sum of the column features over all regions of a row.

    A row with no regions maps to the all-zeros vector; a fully covered
    row maps to all ones. Region boxes are disjoint in x by construction,
    which keeps every entry within [0, 1] up to rounding.
    """
    total = np.zeros(row.num_partitions, dtype=np.float64)
    for col in row.regions:
        total += column_feature(row, col).as_array()
    return FeatureVector(tuple(total))
