#!/usr/bin/env python3
"""Sweep the similarity threshold over a synthetic corpus and tabulate P/R/F1.

Useful for checking how sensitive table metrics are to th_sim before
fixing a value for a new document collection.
"""

import argparse
import tempfile
from pathlib import Path

from tssm.detector import DetectionConfig, detect_and_refine
from tssm.evaluation import evaluate_corpus, load_regions
from tssm.page import load_image
from tssm.synth import generate_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pages", type=int, default=25)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument(
        "--thresholds", type=float, nargs="+",
        default=[0.5, 0.6, 0.7, 0.8, 0.9, 0.95],
    )
    parser.add_argument("--iou-threshold", type=float, default=0.8)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        entries = generate_corpus(args.pages, args.seed, tmp)
        images = {
            Path(e["image"]).stem: load_image(Path(tmp) / e["image"]) for e in entries
        }
        groundtruth = load_regions(tmp)
        print(f"{'th_sim':>7} {'tp':>4} {'fp':>4} {'fn':>4} "
              f"{'precision':>10} {'recall':>8} {'f1':>8}")
        for th in args.thresholds:
            cfg = DetectionConfig(th_sim=th)
            detections = {
                page: [(r.bbox, r.kind) for r in detect_and_refine(img, cfg)]
                for page, img in images.items()
            }
            m = evaluate_corpus(detections, groundtruth, args.iou_threshold)
            print(
                f"{th:>7.2f} {m.tp:>4} {m.fp:>4} {m.fn:>4} "
                f"{m.precision:>10.4f} {m.recall:>8.4f} {m.f1:>8.4f}"
            )


if __name__ == "__main__":
    main()
