import json
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tssm.errors import InvalidInputError, PageMismatchError
from tssm.evaluation import (
    compute_metrics,
    evaluate_corpus,
    load_regions,
    match_detections,
    metrics_from_counts,
    voc_xml_to_page,
)
from tssm.geometry import BBox


def box(x0, y0, x1, y1):
    return BBox.from_coords(x0, y0, x1, y1)


boxes_strategy = st.builds(
    lambda x0, y0, w, h: box(x0, y0, x0 + w, y0 + h),
    st.integers(0, 60),
    st.integers(0, 60),
    st.integers(1, 40),
    st.integers(1, 40),
)


class TestMatchDetections:
    def test_identical_pair(self):
        result = match_detections([box(0, 0, 10, 10)], [box(0, 0, 10, 10)], 0.8)
        assert result.pairs == [(0, 0, 1.0)]
        assert result.unmatched_detections == []
        assert result.unmatched_groundtruth == []

    def test_low_overlap_rejected(self):
        # IOU 1/3 is below the 0.8 bar: one fp, one fn
        result = match_detections(
            [box(0, 0, 100, 100)], [box(50, 0, 150, 100)], 0.8
        )
        assert result.pairs == []
        assert result.unmatched_detections == [0]
        assert result.unmatched_groundtruth == [0]

    def test_greedy_keeps_best_of_two(self):
        gt = box(0, 0, 100, 100)
        close = box(0, 0, 100, 110)  # iou 100/110
        closer = box(0, 0, 100, 104)  # iou 100/104
        result = match_detections([close, closer], [gt], 0.8)
        assert len(result.pairs) == 1
        assert result.pairs[0][0] == 1
        assert result.unmatched_detections == [0]

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            match_detections([], [], 0.0)

    @given(
        st.lists(boxes_strategy, max_size=8),
        st.lists(boxes_strategy, max_size=8),
        st.sampled_from([0.3, 0.5, 0.8]),
    )
    @settings(max_examples=150)
    def test_one_to_one_and_counts(self, dets, gts, threshold):
        result = match_detections(dets, gts, threshold)
        det_idx = [d for d, _, _ in result.pairs]
        gt_idx = [g for _, g, _ in result.pairs]
        assert len(det_idx) == len(set(det_idx))
        assert len(gt_idx) == len(set(gt_idx))
        assert len(result.pairs) + len(result.unmatched_detections) == len(dets)
        assert len(result.pairs) + len(result.unmatched_groundtruth) == len(gts)
        assert all(score >= threshold for _, _, score in result.pairs)

    @given(
        st.lists(boxes_strategy, max_size=6, unique=True),
        st.lists(boxes_strategy, max_size=6, unique=True),
        st.randoms(use_true_random=False),
    )
    @settings(max_examples=100)
    def test_invariant_to_input_order(self, dets, gts, rnd):
        before = match_detections(dets, gts, 0.5)
        shuffled_dets = list(dets)
        shuffled_gts = list(gts)
        rnd.shuffle(shuffled_dets)
        rnd.shuffle(shuffled_gts)
        after = match_detections(shuffled_dets, shuffled_gts, 0.5)
        as_boxes = lambda pairs, d, g: sorted(
            (tuple(d[i].to_list()), tuple(g[j].to_list())) for i, j, _ in pairs
        )
        assert as_boxes(before.pairs, dets, gts) == as_boxes(
            after.pairs, shuffled_dets, shuffled_gts
        )

    def test_raising_threshold_never_gains_matches(self):
        dets = [box(0, 0, 100, 100), box(210, 0, 300, 90), box(400, 5, 490, 100)]
        gts = [box(0, 0, 100, 110), box(200, 0, 300, 90), box(400, 0, 490, 100)]
        previous = None
        for threshold in (0.5, 0.6, 0.7, 0.8, 0.9):
            tp = len(match_detections(dets, gts, threshold).pairs)
            if previous is not None:
                assert tp <= previous
            previous = tp


class TestMetrics:
    def test_hand_counts(self):
        metrics = metrics_from_counts(2, 1, 1)
        assert metrics.precision == pytest.approx(2 / 3)
        assert metrics.recall == pytest.approx(2 / 3)
        assert metrics.f1 == pytest.approx(2 / 3)

    def test_vacuous_perfection(self):
        metrics = metrics_from_counts(0, 0, 0)
        assert (metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0)

    def test_nothing_detected_but_truth_exists(self):
        metrics = metrics_from_counts(0, 0, 3)
        assert metrics.precision == 1.0
        assert metrics.recall == 0.0
        assert metrics.f1 == 0.0

    def test_compute_from_match(self):
        match = match_detections(
            [box(0, 0, 10, 10), box(50, 50, 60, 60)], [box(0, 0, 10, 10)], 0.8
        )
        metrics = compute_metrics(match, 2, 1)
        assert (metrics.tp, metrics.fp, metrics.fn) == (1, 1, 0)

    @given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20))
    def test_f1_between_precision_and_recall(self, tp, fp, fn):
        metrics = metrics_from_counts(tp, fp, fn)
        if metrics.precision > 0 and metrics.recall > 0:
            assert (
                min(metrics.precision, metrics.recall) - 1e-12
                <= metrics.f1
                <= max(metrics.precision, metrics.recall) + 1e-12
            )


class TestEvaluateCorpus:
    def _pages(self):
        dets = {
            "p1": [(box(0, 0, 10, 10), "table"), (box(20, 0, 30, 10), "table"),
                   (box(50, 50, 60, 60), "table")],
            "p2": [(box(0, 0, 10, 10), "table"), (box(20, 0, 30, 10), "table"),
                   (box(50, 50, 60, 60), "table")],
        }
        gts = {
            "p1": [(box(0, 0, 10, 10), "table"), (box(20, 0, 30, 10), "table"),
                   (box(100, 100, 120, 120), "table")],
            "p2": [(box(0, 0, 10, 10), "table"), (box(20, 0, 30, 10), "table"),
                   (box(100, 100, 120, 120), "table")],
        }
        return dets, gts

    def test_micro_average_sums_counts(self):
        dets, gts = self._pages()
        metrics = evaluate_corpus(dets, gts, 0.8)
        assert (metrics.tp, metrics.fp, metrics.fn) == (4, 2, 2)
        assert metrics.precision == pytest.approx(2 / 3)
        assert metrics.recall == pytest.approx(2 / 3)

    def test_perfect_run(self):
        gts = {"a": [(box(0, 0, 10, 10), "table")]}
        metrics = evaluate_corpus(gts, gts, 0.8)
        assert (metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0)

    def test_only_table_kind_counts_by_default(self):
        dets = {"a": [(box(0, 0, 10, 10), "tabular_structure")]}
        gts = {"a": [(box(0, 0, 10, 10), "table"), (box(30, 30, 40, 40), "formula")]}
        metrics = evaluate_corpus(dets, gts, 0.8)
        assert (metrics.tp, metrics.fp, metrics.fn) == (0, 0, 1)
        widened = evaluate_corpus(dets, gts, 0.8, kinds=("table", "tabular_structure"))
        assert (widened.tp, widened.fp, widened.fn) == (1, 0, 0)

    def test_missing_detection_page_counts_as_misses(self):
        gts = {"a": [(box(0, 0, 10, 10), "table")]}
        metrics = evaluate_corpus({}, gts, 0.8)
        assert (metrics.tp, metrics.fn) == (0, 1)

    def test_strict_mode_names_unknown_page(self):
        dets = {"ghost": [(box(0, 0, 10, 10), "table")]}
        with pytest.raises(PageMismatchError, match="ghost"):
            evaluate_corpus(dets, {"real": []}, 0.8, strict=True)

    def test_lenient_mode_skips_with_warning(self, caplog):
        dets = {"ghost": [(box(0, 0, 10, 10), "table")]}
        with caplog.at_level(logging.WARNING):
            metrics = evaluate_corpus(dets, {"real": []}, 0.8, strict=False)
        assert "ghost" in caplog.text
        assert (metrics.tp, metrics.fp, metrics.fn) == (0, 0, 0)


class TestLoaders:
    def test_single_page_object(self, tmp_path):
        path = tmp_path / "det.json"
        path.write_text(
            json.dumps(
                {
                    "page": "p1",
                    "regions": [
                        {"bbox": [0, 0, 10, 10], "kind": "table", "score": 0.9, "rows": 4}
                    ],
                }
            )
        )
        pages = load_regions(path)
        assert pages == {"p1": [(box(0, 0, 10, 10), "table")]}

    def test_page_list(self, tmp_path):
        path = tmp_path / "det.json"
        path.write_text(
            json.dumps(
                [
                    {"page": "a", "regions": []},
                    {"page": "b", "regions": [{"bbox": [1, 2, 3, 4], "kind": "table"}]},
                ]
            )
        )
        pages = load_regions(path)
        assert set(pages) == {"a", "b"}
        assert pages["b"] == [(box(1, 2, 3, 4), "table")]

    def test_directory_skips_manifest(self, tmp_path):
        (tmp_path / "p1.json").write_text(
            json.dumps({"page": "p1", "regions": []})
        )
        (tmp_path / "manifest.json").write_text(json.dumps([{"image": "x.png"}]))
        pages = load_regions(tmp_path)
        assert set(pages) == {"p1"}

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InvalidInputError):
            load_regions(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            load_regions(tmp_path / "absent.json")

    def test_voc_xml_conversion(self, tmp_path):
        xml = """<annotation>
            <filename>page_0003.png</filename>
            <object><name>table</name>
              <bndbox><xmin>12</xmin><ymin>30</ymin><xmax>200</xmax><ymax>90</ymax></bndbox>
            </object>
            <object><name>figure</name>
              <bndbox><xmin>5</xmin><ymin>100</ymin><xmax>50</xmax><ymax>180</ymax></bndbox>
            </object>
        </annotation>"""
        path = tmp_path / "page_0003.xml"
        path.write_text(xml)
        page = voc_xml_to_page(path)
        assert page.page == "page_0003"
        assert page.regions == (
            (box(12, 30, 200, 90), "table"),
            (box(5, 100, 50, 180), "figure"),
        )
        via_loader = load_regions(path)
        assert via_loader == {"page_0003": list(page.regions)}
