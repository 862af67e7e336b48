"""Axis-aligned rectangles on the pixel grid.

Coordinates are integer pixel positions. A box spans the half-open
intervals [tl.x, br.x) horizontally and [tl.y, br.y) vertically, so its
area equals the number of pixels it covers when rasterized. All derived
fractions are computed in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Point:
    """Pixel position; both coordinates are non-negative integers."""

    x: int
    y: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0:
            raise ValueError(f"negative pixel coordinate: ({self.x}, {self.y})")


@dataclass(frozen=True)
class BBox:
    """Rectangle with strictly positive width and height."""

    tl: Point
    br: Point

    def __post_init__(self) -> None:
        if self.br.x <= self.tl.x or self.br.y <= self.tl.y:
            raise ValueError(f"degenerate box: tl={self.tl}, br={self.br}")

    @classmethod
    def from_coords(cls, x0: int, y0: int, x1: int, y1: int) -> "BBox":
        return cls(Point(x0, y0), Point(x1, y1))

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "BBox":
        """Build from the JSON form [x0, y0, x1, y1]."""
        if len(values) != 4:
            raise ValueError(f"expected 4 coordinates, got {len(values)}")
        coords = []
        for v in values:
            if float(v) != int(v):
                raise ValueError(f"non-integer coordinate in bbox: {v!r}")
            coords.append(int(v))
        return cls.from_coords(*coords)

    def to_list(self) -> list[int]:
        """Serialize as [x0, y0, x1, y1]."""
        return [self.tl.x, self.tl.y, self.br.x, self.br.y]

    @property
    def width(self) -> int:
        return self.br.x - self.tl.x

    @property
    def height(self) -> int:
        return self.br.y - self.tl.y

    @property
    def area(self) -> int:
        return self.width * self.height

    def translated(self, dx: int, dy: int) -> "BBox":
        return BBox.from_coords(
            self.tl.x + dx, self.tl.y + dy, self.br.x + dx, self.br.y + dy
        )

    def contains(self, other: "BBox") -> bool:
        return (
            self.tl.x <= other.tl.x
            and self.tl.y <= other.tl.y
            and self.br.x >= other.br.x
            and self.br.y >= other.br.y
        )


def reading_order_key(box: BBox) -> tuple[int, int, int, int]:
    """Sort key: top-to-bottom, then left-to-right."""
    return (box.tl.y, box.tl.x, box.br.y, box.br.x)


def length(box: BBox) -> int:
    """Horizontal extent of a box in pixels."""
    return box.br.x - box.tl.x


def interval_cover_fraction(u0: float, u1: float, v0: float, v1: float) -> float:
    """Fraction of the interval [u0, u1) covered by [v0, v1).

    Clamped to 0 when the overlap is empty or degenerates to a shared
    endpoint; the result lies in [0, 1] for any pair of intervals.
    """
    hi = min(u1, v1)
    lo = max(u0, v0)
    if hi <= lo:
        return 0.0
    return (hi - lo) / (u1 - u0)


def x_cover_fraction(u: BBox, v: BBox) -> float:
    """Fraction of u's horizontal extent covered by v; y is ignored.

    Not symmetric: the denominator is u's own width.
    """
    return interval_cover_fraction(u.tl.x, u.br.x, v.tl.x, v.br.x)


def intersection_area(a: BBox, b: BBox) -> int:
    """Area of the geometric intersection; 0 when disjoint in either axis."""
    w = min(a.br.x, b.br.x) - max(a.tl.x, b.tl.x)
    h = min(a.br.y, b.br.y) - max(a.tl.y, b.tl.y)
    if w <= 0 or h <= 0:
        return 0
    return w * h


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 1 iff the boxes are identical."""
    inter = intersection_area(a, b)
    return inter / (a.area + b.area - inter)


def union_bbox(boxes: Iterable[BBox]) -> BBox:
    """Tight cover of a non-empty collection of boxes."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("cannot take the union of zero boxes")
    return BBox.from_coords(
        min(b.tl.x for b in boxes),
        min(b.tl.y for b in boxes),
        max(b.br.x for b in boxes),
        max(b.br.y for b in boxes),
    )
