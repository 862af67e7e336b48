#!/usr/bin/env python3
"""Worked example of the row similarity measure on three constructed rows.

Two rows share a column layout, the third does not; the printed matrix
shows the aligned pair scoring far above either pairing with the odd row.
"""

import numpy as np

from tssm.geometry import BBox
from tssm.rows import RowElement, SubElement, row_feature
from tssm.similarity import pairwise_tssm

FRAME = BBox.from_coords(0, 0, 525, 10)
CHAR_WIDTH = 25
GAP_THRESHOLD = 10


def build_row(cells):
    subs = [SubElement(BBox.from_coords(a, 0, b, 10)) for a, b in cells]
    return RowElement.build(FRAME, subs, CHAR_WIDTH, GAP_THRESHOLD)


def main():
    layouts = {
        "row1": [(0, 150), (300, 450)],
        "row2": [(0, 140), (300, 440)],
        "row3": [(80, 230), (350, 500)],
    }
    rows = {name: build_row(cells) for name, cells in layouts.items()}
    features = {name: row_feature(r) for name, r in rows.items()}

    n = next(iter(rows.values())).num_partitions
    print(f"frame width {FRAME.width}px, {n} partitions of {FRAME.width / n:g}px\n")
    for name, feat in features.items():
        cols = len(rows[name].regions)
        rendered = " ".join(f"{v:.2f}" for v in feat)
        print(f"{name} ({cols} regions): [{rendered}]")

    matrix = pairwise_tssm(list(features.values())).values
    print("\npairwise similarity:")
    names = list(features)
    header = " ".join(f"{n:>6}" for n in names)
    print(f"{'':>6} {header}")
    for i, name in enumerate(names):
        cells = " ".join(f"{matrix[i, j]:6.3f}" for j in range(len(names)))
        print(f"{name:>6} {cells}")

    adjacent = np.diagonal(matrix, 1)
    print(f"\nadjacent-pair scores: {np.round(adjacent, 3).tolist()}")


if __name__ == "__main__":
    main()
