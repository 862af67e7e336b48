"""Independent oracles shared by the test modules.

Everything here is deliberately written the slow, direct way (pixel
counting, flood fill, plain-Python formula evaluation) so it stays
independent of the implementation paths it checks.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time
from collections import deque

import numpy as np

from tssm.geometry import BBox
from tssm.rows import RowElement, SubElement


def rasterize_box(box: BBox, width: int, height: int) -> np.ndarray:
    mask = np.zeros((height, width), dtype=bool)
    mask[box.tl.y : box.br.y, box.tl.x : box.br.x] = True
    return mask


def pixel_iou(a: BBox, b: BBox) -> float:
    """IOU by literally counting rasterized pixels."""
    width = max(a.br.x, b.br.x)
    height = max(a.br.y, b.br.y)
    ma = rasterize_box(a, width, height)
    mb = rasterize_box(b, width, height)
    inter = int(np.count_nonzero(ma & mb))
    union = int(np.count_nonzero(ma | mb))
    return inter / union


def flood_fill_components(mask: np.ndarray) -> list[frozenset[tuple[int, int]]]:
    """8-connected ink components as pixel sets, via breadth-first search."""
    height, width = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    components = []
    for sy in range(height):
        for sx in range(width):
            if not mask[sy, sx] or seen[sy, sx]:
                continue
            queue = deque([(sy, sx)])
            seen[sy, sx] = True
            pixels = []
            while queue:
                y, x = queue.popleft()
                pixels.append((y, x))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = y + dy, x + dx
                        if (
                            0 <= ny < height
                            and 0 <= nx < width
                            and mask[ny, nx]
                            and not seen[ny, nx]
                        ):
                            seen[ny, nx] = True
                            queue.append((ny, nx))
            components.append(frozenset(pixels))
    return components


def brute_force_tssm(fu, fv) -> float:
    """Direct evaluation of the distance/normalization/similarity chain."""
    fu = list(fu)
    fv = list(fv)
    assert len(fu) == len(fv) and fu
    dist = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(fu, fv)))
    return 1.0 - dist / math.sqrt(len(fu))


def pixel_row_feature(row: RowElement) -> np.ndarray:
    """Coverage per partition by counting whole covered pixel columns.

    Counts only columns that lie entirely inside a partition, so it can
    differ from the closed form by at most 2 edge columns per partition.
    """
    x0, x1 = row.frame.tl.x, row.frame.br.x
    covered = np.zeros(x1 - x0, dtype=bool)
    for region in row.regions:
        for sub in region.members:
            lo = max(sub.bbox.tl.x, x0) - x0
            hi = min(sub.bbox.br.x, x1) - x0
            if hi > lo:
                covered[lo:hi] = True
    n = row.num_partitions
    edges = np.linspace(x0, x1, n + 1)
    out = np.zeros(n)
    for i in range(n):
        lo = math.ceil(edges[i])
        hi = math.floor(edges[i + 1])
        count = int(np.count_nonzero(covered[lo - x0 : hi - x0])) if hi > lo else 0
        out[i] = count / (edges[i + 1] - edges[i])
    return out


def make_subelements(intervals, y0: int = 0, y1: int = 10) -> list[SubElement]:
    """Sub-elements from x-intervals sharing one y band."""
    return [SubElement(BBox.from_coords(a, y0, b, y1)) for a, b in intervals]


def run_cli(args, **kwargs) -> subprocess.CompletedProcess:
    """Run the installed CLI in a subprocess, capturing text output."""
    return subprocess.run(
        [sys.executable, "-m", "tssm", *map(str, args)],
        capture_output=True,
        text=True,
        **kwargs,
    )


def run_cli_monitored(args) -> tuple[int, float, int]:
    """Run the CLI while sampling the process tree's resident memory.

    Returns (exit code, wall seconds, peak RSS in bytes).
    """
    import psutil

    start = time.monotonic()
    proc = subprocess.Popen(
        [sys.executable, "-m", "tssm", *map(str, args)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    handle = psutil.Process(proc.pid)
    peak = 0
    while proc.poll() is None:
        try:
            rss = handle.memory_info().rss
            for child in handle.children(recursive=True):
                rss += child.memory_info().rss
        except psutil.NoSuchProcess:
            break
        peak = max(peak, rss)
        time.sleep(0.005)
    wall = time.monotonic() - start
    return proc.returncode, wall, peak
