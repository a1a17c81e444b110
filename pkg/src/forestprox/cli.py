"""Command-line surface.

Subcommands: simulate, train, predict, proximity, kernel, deriv, grid,
bench. All outputs are CSV tables or JSON reports; failures exit nonzero
with a machine-readable JSON error on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bench import (
    ExperimentConfig,
    default_estimators,
    resolve_mtry,
    run_experiment,
)
from .data_model import augment_junk, load_csv, save_csv
from .diagnostics import derivative_report, kernel_grid
from .forest import Forest, ForestParams, train_forest
from .kernel_lab import (
    NaiveKernelSpec,
    mc_proximity,
    naive_kernel,
    strong_weak_weights,
)
from .synthgen import MODELS, get_model, sample
from .tree import TreeParams

MODE_GROWTH = {
    # mode -> (split_mode, default min_node_size)
    "class": ("impurity", 1),
    "reg": ("impurity", 5),
    "prox": ("impurity", 5),
    "random": ("completely_random", 1),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forestprox",
        description="Random-forest probability estimation and proximity-kernel tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write a synthetic dataset as CSV")
    p_sim.add_argument("--model", required=True, choices=sorted(MODELS))
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--junk", type=int, default=0)
    p_sim.add_argument("--out", required=True)

    p_train = sub.add_parser("train", help="train a forest on a CSV and save it")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--label-column", default="label")
    p_train.add_argument(
        "--true-prob-column", default="auto",
        help="column to exclude as a known-probability companion; "
        "'auto' drops a column named true_prob, 'none' keeps everything",
    )
    p_train.add_argument("--trees", type=int, default=200)
    p_train.add_argument("--mtry", default="sqrt")
    p_train.add_argument("--mode", choices=sorted(MODE_GROWTH), default="class")
    p_train.add_argument("--min-node-size", type=int, default=None)
    p_train.add_argument("--bootstrap", choices=("on", "off"), default="on")
    p_train.add_argument("--junk", type=int, default=0)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", required=True)

    p_pred = sub.add_parser("predict", help="per-point probabilities from a saved forest")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--label-column", default=None)
    p_pred.add_argument("--out", required=True)

    p_prox = sub.add_parser("proximity", help="pairwise proximity matrix for a CSV of points")
    p_prox.add_argument("--model", required=True)
    p_prox.add_argument("--data", required=True)
    p_prox.add_argument("--label-column", default=None)
    p_prox.add_argument("--out", required=True)

    p_kern = sub.add_parser(
        "kernel", help="analytic selection weights and simulated-vs-analytic kernel curves"
    )
    p_kern.add_argument("--strong", type=int, required=True)
    p_kern.add_argument("--weak", type=int, required=True)
    p_kern.add_argument("--leaves", type=int, default=32)
    p_kern.add_argument("--mtry", type=int, default=None, help="single mtry; default sweeps 1..p")
    p_kern.add_argument("--trees", type=int, default=20_000)
    p_kern.add_argument("--seed", type=int, default=0)
    p_kern.add_argument("--out-weights", required=True)
    p_kern.add_argument("--out-compare", default=None)

    p_der = sub.add_parser("deriv", help="one-sided derivative report for a forest's kernel")
    p_der.add_argument("--model", required=True)
    p_der.add_argument("--center", default="means", help="'means' or comma-separated values")
    p_der.add_argument("--h", type=float, default=None, help="fixed step for all coordinates")
    p_der.add_argument(
        "--h-sd", type=float, default=0.2,
        help="step as a multiple of each feature's training standard deviation",
    )
    p_der.add_argument("--out", required=True)

    p_grid = sub.add_parser("grid", help="2-d level-set grid of a forest's kernel")
    p_grid.add_argument("--model", required=True)
    p_grid.add_argument("--center", required=True, help="comma-separated coordinates")
    p_grid.add_argument("--dims", default="0,1")
    p_grid.add_argument("--resolution", type=int, default=41)
    p_grid.add_argument("--bounds", default=None, help="lo_i,hi_i,lo_j,hi_j (default: data range)")
    p_grid.add_argument("--out", required=True)

    p_bench = sub.add_parser("bench", help="repeated-split estimator comparison")
    src = p_bench.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", choices=sorted(MODELS))
    src.add_argument("--data")
    p_bench.add_argument("--label-column", default="label")
    p_bench.add_argument(
        "--true-prob-column", default="auto",
        help="column to exclude as a known-probability companion; "
        "'auto' drops a column named true_prob, 'none' keeps everything",
    )
    p_bench.add_argument("--trees", type=int, default=200)
    p_bench.add_argument("--reps", type=int, default=10)
    p_bench.add_argument("--train-n", type=int, default=500)
    p_bench.add_argument("--test-n", type=int, default=1000)
    p_bench.add_argument("--train-fraction", type=float, default=0.8)
    p_bench.add_argument("--junk", type=int, default=0)
    p_bench.add_argument("--bootstrap", choices=("on", "off"), default="on")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument(
        "--estimators", default="all",
        help="comma-separated roster names, or 'all' for the default roster",
    )
    p_bench.add_argument("--out", required=True, help="JSON report path")
    p_bench.add_argument("--out-csv", default=None, help="optional summary table CSV")

    return parser


def _write_csv(path: str, header: list[str], rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _parse_mtry(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _csv_header(path: str) -> list[str]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [h.strip() for h in next(csv.reader(fh))]


def _resolve_true_prob_column(choice: str, path: str) -> str | None:
    if choice == "none":
        return None
    if choice == "auto":
        return "true_prob" if "true_prob" in _csv_header(path) else None
    return choice


def _cmd_simulate(args) -> int:
    data = sample(get_model(args.model), args.n, args.seed)
    if args.junk > 0:
        data = augment_junk(data, args.junk, args.seed + 1)
    save_csv(data, args.out)
    return 0


def _cmd_train(args) -> int:
    data = load_csv(
        args.data,
        _label_col(args.label_column),
        true_prob_column=_resolve_true_prob_column(args.true_prob_column, args.data),
    )
    if args.junk > 0:
        data = augment_junk(data, args.junk, args.seed + 1)
    split_mode, default_mns = MODE_GROWTH[args.mode]
    mns = default_mns if args.min_node_size is None else args.min_node_size
    mtry_arg = _parse_mtry(args.mtry)
    if mtry_arg == "best":
        raise ValueError("mtry 'best' is a bench roster option; give train a value or symbol")
    mtry = resolve_mtry(mtry_arg, data.p)
    params = ForestParams(
        n_trees=args.trees,
        tree=TreeParams(
            mtry=mtry,
            min_node_size=mns,
            split_mode=split_mode,
            bootstrap=args.bootstrap == "on",
        ),
        seed=args.seed,
    )
    forest = train_forest(data, params)
    forest.save(args.out)
    return 0


def _label_col(value):
    if value is None:
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        return value


def _load_points(path: str, label_column, p: int, names) -> np.ndarray:
    """Feature matrix from a CSV of query points.

    Columns matching the forest's feature names are used when all are
    present (extra columns like label or true_prob are ignored); otherwise
    the first p columns are taken, after dropping the label column if one
    was named.
    """
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [r for r in reader if r]
    if set(names) <= set(header):
        cols = [header.index(n) for n in names]
    else:
        keep = [
            j for j, h in enumerate(header)
            if label_column is None or h != str(label_column)
        ]
        if len(keep) < p:
            raise ValueError(
                f"{path}: expected columns {list(names)} or at least {p} feature columns"
            )
        cols = keep[:p]
    X = np.empty((len(rows), p))
    for i, row in enumerate(rows):
        for k, j in enumerate(cols):
            X[i, k] = float(row[j])
    return X


def _cmd_predict(args) -> int:
    forest = Forest.load(args.model)
    X = _load_points(args.data, args.label_column, forest.p, forest.train.feature_names)
    p_class = forest.predict_proba_batch(X, "class_vote")
    p_reg = forest.predict_proba_batch(X, "reg_mean")
    p_prox = forest.predict_proba_batch(X, "prox")
    _write_csv(
        args.out,
        ["row", "p_class", "p_reg", "p_prox"],
        [
            [i, repr(float(a)), repr(float(b)), repr(float(c))]
            for i, (a, b, c) in enumerate(zip(p_class, p_reg, p_prox))
        ],
    )
    return 0


def _cmd_proximity(args) -> int:
    forest = Forest.load(args.model)
    X = _load_points(args.data, args.label_column, forest.p, forest.train.feature_names)
    P = forest.proximity_matrix(X).values
    _write_csv(
        args.out,
        [f"p{j}" for j in range(P.shape[1])],
        [[repr(float(v)) for v in row] for row in P],
    )
    return 0


def _cmd_kernel(args) -> int:
    p = args.strong + args.weak
    mtry_values = [args.mtry] if args.mtry is not None else list(range(1, p + 1))
    rows = []
    for m in mtry_values:
        spec = NaiveKernelSpec(leaves=args.leaves, strong=args.strong, weak=args.weak, mtry=m)
        p_s, p_w = strong_weak_weights(spec)
        rows.append([m, repr(p_s), repr(p_w)])
    _write_csv(args.out_weights, ["mtry", "p_strong", "p_weak"], rows)

    if args.out_compare is not None:
        m = args.mtry if args.mtry is not None else max(1, p // 2)
        spec = NaiveKernelSpec(leaves=args.leaves, strong=args.strong, weak=args.weak, mtry=m)
        strong_set = list(range(args.strong))
        rows = []
        for axis in ("strong", "weak", "spread"):
            if axis == "strong" and args.strong == 0:
                continue
            if axis == "weak" and args.weak == 0:
                continue
            for t in np.linspace(0.05, 0.5, 10):
                x = np.zeros(p)
                if axis == "strong":
                    x[0] = t
                elif axis == "weak":
                    x[args.strong] = t
                else:
                    x[:] = t / p
                ana = naive_kernel(spec, x, strong_set)
                mc = mc_proximity(spec, x, strong_set, args.trees, args.seed)
                rows.append([axis, repr(float(t)), repr(ana), repr(mc)])
        _write_csv(args.out_compare, ["axis", "scale", "analytic", "monte_carlo"], rows)
    return 0


def _cmd_deriv(args) -> int:
    forest = Forest.load(args.model)
    X = forest.train.features
    if args.center == "means":
        center = X.mean(axis=0)
    else:
        center = np.array([float(v) for v in args.center.split(",")])
    if args.h is not None:
        steps = np.full(forest.p, args.h)
    else:
        sd = X.std(axis=0)
        steps = np.where(sd > 0, args.h_sd * sd, 1e-6)
    report = derivative_report(forest.proximity, center, steps)
    _write_csv(
        args.out,
        ["coordinate", "name", "left", "right", "step"],
        [
            [j, forest.train.feature_names[j], repr(float(report.left[j])),
             repr(float(report.right[j])), repr(float(report.steps[j]))]
            for j in range(forest.p)
        ],
    )
    return 0


def _cmd_grid(args) -> int:
    forest = Forest.load(args.model)
    center = np.array([float(v) for v in args.center.split(",")])
    i, j = (int(v) for v in args.dims.split(","))
    if args.bounds is not None:
        lo_i, hi_i, lo_j, hi_j = (float(v) for v in args.bounds.split(","))
    else:
        X = forest.train.features
        lo_i, hi_i = float(X[:, i].min()), float(X[:, i].max())
        lo_j, hi_j = float(X[:, j].min()), float(X[:, j].max())
    grid = kernel_grid(
        forest.proximity, center, (i, j), args.resolution, ((lo_i, hi_i), (lo_j, hi_j))
    )
    rows = []
    for a, vi in enumerate(grid.axis_i):
        for b, vj in enumerate(grid.axis_j):
            rows.append([repr(float(vi)), repr(float(vj)), repr(float(grid.values[a, b]))])
    _write_csv(args.out, [f"x{i + 1}", f"x{j + 1}", "kernel"], rows)
    return 0


def _cmd_bench(args) -> int:
    roster = default_estimators()
    if args.estimators != "all":
        wanted = [tok.strip() for tok in args.estimators.split(",") if tok.strip()]
        by_name = {e.name: e for e in roster}
        missing = [w for w in wanted if w not in by_name]
        if missing:
            raise ValueError(f"unknown estimators {missing}; roster: {sorted(by_name)}")
        roster = tuple(by_name[w] for w in wanted)
    cfg = ExperimentConfig(
        source=args.synthetic if args.synthetic else "csv",
        estimators=tuple(roster),
        csv_path=args.data,
        label_column=_label_col(args.label_column),
        true_prob_column=None
        if args.data is None
        else _resolve_true_prob_column(args.true_prob_column, args.data),
        n_trees=args.trees,
        repetitions=args.reps,
        train_size=args.train_n,
        test_size=args.test_n,
        train_fraction=args.train_fraction,
        junk=args.junk,
        seed=args.seed,
        bootstrap=args.bootstrap == "on",
    )
    report = run_experiment(cfg)
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    if args.out_csv:
        rows = report.table_rows()
        header = list(rows[0].keys())
        _write_csv(args.out_csv, header, [[row[k] for k in header] for row in rows])
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "proximity": _cmd_proximity,
    "kernel": _cmd_kernel,
    "deriv": _cmd_deriv,
    "grid": _cmd_grid,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:
        print(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
