#!/usr/bin/env python3
"""Average terminal-node count of a forest tree as a function of mtry on
the 50-d halfspace model."""

import argparse
import csv
from pathlib import Path

import numpy as np

from forestprox.forest import ForestParams, train_forest
from forestprox.synthgen import get_model, sample
from forestprox.tree import TreeParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--mtry", type=int, nargs="+", default=[1, 5, 15, 30, 50])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--trees", type=int, default=5)
    ap.add_argument("--seed", type=int, default=71)
    ap.add_argument("--out", default="out_kernel/leaf_counts.csv")
    args = ap.parse_args()

    d = sample(get_model("motivating50"), args.n, args.seed)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mtry", "mean_leaf_count", "stderr"])
        for m in args.mtry:
            counts = [
                train_forest(
                    d,
                    ForestParams(
                        n_trees=args.trees,
                        tree=TreeParams(mtry=m, min_node_size=1, bootstrap=True),
                        seed=s,
                    ),
                ).stats()["mean_leaf_count"]
                for s in range(args.seeds)
            ]
            writer.writerow([m, np.mean(counts), np.std(counts, ddof=1) / np.sqrt(len(counts))])
            print(f"mtry={m}: mean leaf count {np.mean(counts):.1f}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
