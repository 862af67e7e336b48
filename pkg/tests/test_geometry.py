import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import pixel_iou
from tssm.geometry import (
    BBox,
    Point,
    intersection_area,
    iou,
    length,
    union_bbox,
    x_cover_fraction,
)


def box(x0, y0, x1, y1):
    return BBox.from_coords(x0, y0, x1, y1)


boxes = st.builds(
    lambda x0, y0, w, h: box(x0, y0, x0 + w, y0 + h),
    st.integers(0, 200),
    st.integers(0, 200),
    st.integers(1, 100),
    st.integers(1, 100),
)


class TestPrimitives:
    def test_point_rejects_negative(self):
        with pytest.raises(ValueError):
            Point(-1, 0)

    def test_bbox_rejects_degenerate(self):
        with pytest.raises(ValueError):
            box(10, 0, 10, 5)
        with pytest.raises(ValueError):
            box(0, 8, 5, 8)

    def test_json_round_trip(self):
        b = box(3, 4, 10, 20)
        assert b.to_list() == [3, 4, 10, 20]
        assert BBox.from_list([3, 4, 10, 20]) == b
        assert BBox.from_list([3.0, 4.0, 10.0, 20.0]) == b

    def test_from_list_rejects_fractional(self):
        with pytest.raises(ValueError):
            BBox.from_list([0, 0, 10.5, 10])


class TestLength:
    def test_wide_box(self):
        assert length(box(0, 0, 100, 20)) == 100

    def test_offset_box(self):
        assert length(box(40, 5, 61, 15)) == 21

    def test_minimal_box(self):
        assert length(box(7, 0, 8, 1)) == 1


class TestXCoverFraction:
    def test_identical_extent(self):
        assert x_cover_fraction(box(0, 0, 100, 10), box(0, 20, 100, 30)) == 1.0

    def test_disjoint(self):
        assert x_cover_fraction(box(0, 0, 100, 10), box(200, 0, 300, 10)) == 0.0

    def test_half_overlap(self):
        # min(100, 150) - max(0, 50) = 50 over width 100
        assert x_cover_fraction(box(0, 0, 100, 10), box(50, 0, 150, 10)) == 0.5

    def test_shared_edge_is_zero(self):
        assert x_cover_fraction(box(0, 0, 100, 10), box(100, 0, 200, 10)) == 0.0

    def test_asymmetric_witness(self):
        u = box(0, 0, 100, 10)
        v = box(0, 0, 50, 10)
        assert x_cover_fraction(u, v) == 0.5
        assert x_cover_fraction(v, u) == 1.0

    @given(boxes, boxes)
    def test_bounds(self, u, v):
        assert 0.0 <= x_cover_fraction(u, v) <= 1.0

    @given(boxes)
    def test_self_cover_is_one(self, u):
        assert x_cover_fraction(u, u) == 1.0

    @given(boxes, boxes, st.integers(0, 500))
    def test_translation_invariant(self, u, v, dx):
        assert x_cover_fraction(u, v) == x_cover_fraction(
            u.translated(dx, 0), v.translated(dx, 0)
        )


class TestIntersectionArea:
    def test_self_intersection(self):
        b = box(0, 0, 100, 100)
        assert intersection_area(b, b) == 10000

    def test_disjoint(self):
        assert intersection_area(box(0, 0, 10, 10), box(50, 50, 60, 60)) == 0

    def test_half_overlap(self):
        assert intersection_area(box(0, 0, 100, 100), box(50, 0, 150, 100)) == 5000


class TestIou:
    def test_identical(self):
        b = box(5, 5, 105, 105)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(box(0, 0, 10, 10), box(50, 50, 60, 60)) == 0.0

    def test_offset_by_half(self):
        # 5000 shared out of 10000 + 10000 - 5000
        assert iou(box(0, 0, 100, 100), box(50, 0, 150, 100)) == 5000 / 15000

    @given(boxes, boxes)
    def test_symmetric_and_bounded(self, a, b):
        assert iou(a, b) == iou(b, a)
        assert 0.0 <= iou(a, b) <= 1.0

    @given(boxes, boxes)
    def test_one_iff_identical(self, a, b):
        if a == b:
            assert iou(a, b) == 1.0
        else:
            assert iou(a, b) < 1.0

    @given(boxes, boxes, st.integers(0, 300), st.integers(0, 300))
    def test_translation_invariant(self, a, b, dx, dy):
        assert iou(a, b) == iou(a.translated(dx, dy), b.translated(dx, dy))

    @given(boxes, boxes)
    def test_matches_pixel_count_oracle(self, a, b):
        assert iou(a, b) == pixel_iou(a, b)


class TestUnionBbox:
    def test_union(self):
        got = union_bbox([box(0, 5, 10, 10), box(8, 0, 30, 7)])
        assert got == box(0, 0, 30, 10)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            union_bbox([])
