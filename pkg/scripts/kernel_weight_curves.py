#!/usr/bin/env python3
"""Selection-weight curves of the stylized forest kernel: p_strong and
p_weak as a function of mtry for a fixed strong count and a range of weak
counts, with a Monte Carlo check column.
"""

import argparse
import csv
from pathlib import Path

from forestprox.kernel_lab import NaiveKernelSpec, mc_selection_freq, strong_weak_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--strong", type=int, default=5)
    ap.add_argument("--weak", type=int, nargs="+", default=[5, 25, 45, 65, 85])
    ap.add_argument("--trials", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out_kernel/weight_curves.csv")
    args = ap.parse_args()

    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strong", "weak", "mtry", "p_strong", "p_weak", "mc_strong", "mc_weak"])
        for W in args.weak:
            p = args.strong + W
            for mtry in range(1, p + 1):
                spec = NaiveKernelSpec(leaves=2, strong=args.strong, weak=W, mtry=mtry)
                p_s, p_w = strong_weak_weights(spec)
                freq = mc_selection_freq(spec, args.trials, seed=args.seed + mtry)
                writer.writerow(
                    [args.strong, W, mtry, p_s, p_w,
                     freq[: args.strong].mean(), freq[args.strong :].mean() if W else 0.0]
                )
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
