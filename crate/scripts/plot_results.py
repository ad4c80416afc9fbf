#!/usr/bin/env python3
"""Quick-look plots for `splice simulate` output directories.

Usage: scripts/plot_results.py OUT_DIR [--save PREFIX]

Reads peaks.csv and ecdf.csv and draws delay-error scatter plus per-rank
ECDF curves. Dev convenience only; nothing in the toolkit depends on it.
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--save", metavar="PREFIX", help="write PNGs instead of showing")
    args = ap.parse_args()

    try:
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is required: pip install matplotlib")

    peaks = read_csv(args.out_dir / "peaks.csv")
    ecdf = read_csv(args.out_dir / "ecdf.csv")

    fig1, ax = plt.subplots()
    by_path = defaultdict(list)
    for row in peaks:
        if row["error_samples"]:
            by_path[int(row["path"])].append(
                (int(row["packet"]), float(row["error_samples"]))
            )
    for path, pts in sorted(by_path.items()):
        xs, ys = zip(*pts)
        ax.plot(xs, ys, "o", label=f"path {path}")
    ax.set_xlabel("packet")
    ax.set_ylabel("delay error [wideband samples]")
    ax.legend()
    ax.set_title("matched-peak delay errors")

    fig2, ax = plt.subplots()
    by_rank = defaultdict(list)
    for row in ecdf:
        by_rank[int(row["rank"])].append(
            (float(row["delay_ns"]), float(row["probability"]))
        )
    for rank, pts in sorted(by_rank.items()):
        xs, ys = zip(*pts)
        ax.step(xs, ys, where="post", label=f"rank {rank}")
    ax.set_xlabel("estimated delay [ns]")
    ax.set_ylabel("cumulative probability")
    ax.legend()
    ax.set_title("ECDF of recovered delays by strength rank")

    if args.save:
        fig1.savefig(f"{args.save}_errors.png", dpi=150)
        fig2.savefig(f"{args.save}_ecdf.png", dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
