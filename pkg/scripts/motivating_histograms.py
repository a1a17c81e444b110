#!/usr/bin/env python3
"""Histograms of estimated probabilities on the 50-d halfspace model for a
weak (mtry=1) and a strong (mtry=30) classification forest, plus the
kernel voting weights at a reference point.

Writes <out>/histograms.csv, <out>/voting_weights_mtry{1,30}.csv and a
summary line per forest on stdout.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from forestprox.bench import misclassification, rmse_true
from forestprox.diagnostics import prob_histogram
from forestprox.forest import ForestParams, train_forest
from forestprox.synthgen import get_model, sample
from forestprox.tree import TreeParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--train-n", type=int, default=1000)
    ap.add_argument("--test-n", type=int, default=1000)
    ap.add_argument("--trees", type=int, default=500)
    ap.add_argument("--seed", type=int, default=100)
    ap.add_argument("--bins", type=int, default=10)
    ap.add_argument("--out", default="out_motivating")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model = get_model("motivating50")
    train = sample(model, args.train_n, args.seed)
    test = sample(model, args.test_n, args.seed + 100)
    x0 = np.full(50, 0.5)

    rows = []
    for mtry in (1, 30):
        forest = train_forest(
            train,
            ForestParams(
                n_trees=args.trees,
                tree=TreeParams(mtry=mtry, min_node_size=1, bootstrap=True),
                seed=args.seed + 7,
            ),
        )
        preds = forest.predict_proba_batch(test.features, "class_vote")
        hist = prob_histogram(preds, args.bins)
        rows.append((mtry, hist))
        print(
            f"mtry={mtry}: test_error={misclassification(preds, test.labels):.3f} "
            f"rmse_true={rmse_true(preds, test.true_probs):.3f}"
        )
        weights = forest.voting_weights(x0)
        with (out / f"voting_weights_mtry{mtry}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "x1", "x2", "label", "weight"])
            for i in np.flatnonzero(weights > 0):
                writer.writerow(
                    [i, train.features[i, 0], train.features[i, 1], train.labels[i], weights[i]]
                )

    with (out / "histograms.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high"] + [f"count_mtry{m}" for m, _ in rows])
        for b in range(args.bins):
            writer.writerow(
                [b / args.bins, (b + 1) / args.bins] + [int(h[b]) for _, h in rows]
            )
    print(f"wrote {out}/histograms.csv")


if __name__ == "__main__":
    main()
