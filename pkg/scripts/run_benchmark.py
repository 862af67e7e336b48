#!/usr/bin/env python3
"""End-to-end benchmark: synthesize a corpus, detect, evaluate, time it.

Runs each stage through the CLI in a subprocess so the numbers reflect
what a cold start costs, and samples resident memory along the way.
"""

import argparse
import json
import subprocess
import sys
import tempfile
import time
from pathlib import Path

try:
    import psutil
except ImportError:
    psutil = None


def run_stage(args):
    start = time.monotonic()
    proc = subprocess.Popen([sys.executable, "-m", "tssm", *map(str, args)])
    peak = 0
    if psutil is not None:
        handle = psutil.Process(proc.pid)
        while proc.poll() is None:
            try:
                rss = handle.memory_info().rss
                for child in handle.children(recursive=True):
                    rss += child.memory_info().rss
                peak = max(peak, rss)
            except psutil.NoSuchProcess:
                break
            time.sleep(0.005)
    code = proc.wait()
    if code != 0:
        raise SystemExit(f"stage {' '.join(map(str, args[:1]))} failed with {code}")
    return time.monotonic() - start, peak


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pages", type=int, default=50)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--iou-threshold", type=float, default=0.8)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--workdir", help="keep artifacts here instead of a tempdir")
    args = parser.parse_args()

    ctx = (
        tempfile.TemporaryDirectory()
        if args.workdir is None
        else _keep_dir(args.workdir)
    )
    with ctx as base:
        base = Path(base)
        corpus = base / "corpus"
        det = base / "det.json"
        report = base / "report.json"
        stages = [
            ("synth", ["synth", "--pages", args.pages, "--seed", args.seed, "--out", corpus]),
            ("detect", ["detect", "--input", corpus, "--out", det, "--jobs", args.jobs]),
            (
                "eval",
                [
                    "eval", "--detections", det, "--groundtruth", corpus,
                    "--iou-threshold", args.iou_threshold, "--report", report,
                ],
            ),
        ]
        total = 0.0
        peak = 0
        for name, stage_args in stages:
            wall, rss = run_stage(stage_args)
            total += wall
            peak = max(peak, rss)
            print(f"{name:>7}: {wall:6.2f}s" + (f"  peak {rss / 1e6:6.1f}MB" if rss else ""))
        metrics = json.loads(report.read_text())
        print(
            f"\nprecision {metrics['precision']:.6f} recall {metrics['recall']:.6f} "
            f"f1 {metrics['f1']:.6f}  (tp {metrics['tp']} fp {metrics['fp']} fn {metrics['fn']})"
        )
        print(f"total wall {total:.2f}s" + (f", peak RSS {peak / 1e6:.1f}MB" if peak else ""))


class _keep_dir:
    def __init__(self, path):
        self.path = Path(path)

    def __enter__(self):
        self.path.mkdir(parents=True, exist_ok=True)
        return str(self.path)

    def __exit__(self, *exc):
        return False


if __name__ == "__main__":
    main()
