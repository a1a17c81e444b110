"""Benchmark harness: repeated-split probability-estimation experiments.

A run draws data (synthetic model or user CSV), fits a roster of forest
estimators per repetition, and aggregates RMSE and misclassification.
Synthetic runs score against the known generating probabilities; CSV runs
fall back to empirical RMSE against the held-out labels. Everything is
deterministic for a fixed base seed, with per-repetition and
per-estimator seeds derived by spawn keys so results do not depend on
execution order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .data_model import Dataset, augment_junk, load_csv, train_test_split
from .forest import ForestParams, train_forest
from .synthgen import get_model, sample
from .tree import TreeParams

MTRY_SYMBOLS = ("sqrt", "third", "half", "threequarters", "all", "best")


def rmse_true(predictions, true_probs) -> float:
    """Root mean squared error against known probabilities."""
    p_hat = np.asarray(predictions, dtype=np.float64)
    p = np.asarray(true_probs, dtype=np.float64)
    if p_hat.shape != p.shape or p_hat.size == 0:
        raise ValueError(f"need equal nonempty lengths, got {p_hat.shape} vs {p.shape}")
    return float(np.sqrt(np.mean((p_hat - p) ** 2)))


def rmse_empirical(predictions, labels) -> float:
    """Root mean squared error against 0/1 labels (mean inside the root,
    so values are comparable across dataset sizes)."""
    p_hat = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p_hat.shape != y.shape or p_hat.size == 0:
        raise ValueError(f"need equal nonempty lengths, got {p_hat.shape} vs {y.shape}")
    return float(np.sqrt(np.mean((p_hat - y) ** 2)))


def misclassification(predictions, labels) -> float:
    """Error of the induced classifier; predict 1 when p >= 0.5."""
    p_hat = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels)
    return float(np.mean((p_hat >= 0.5).astype(np.int64) != y))


def resolve_mtry(mtry, p: int) -> int:
    if isinstance(mtry, str):
        if mtry == "sqrt":
            value = round(math.sqrt(p))
        elif mtry == "third":
            value = round(p / 3)
        elif mtry == "half":
            value = round(p / 2)
        elif mtry == "threequarters":
            value = round(3 * p / 4)
        elif mtry == "all":
            value = p
        else:
            raise ValueError(f"unknown mtry symbol {mtry!r}")
        return max(1, min(p, int(value)))
    value = int(mtry)
    if not 1 <= value <= p:
        raise ValueError(f"mtry={value} out of range [1, {p}]")
    return value


def tuning_grid(p: int) -> list[int]:
    raw = {1, p}
    for symbol in ("sqrt", "third", "half", "threequarters"):
        raw.add(resolve_mtry(symbol, p))
    return sorted(raw)


@dataclass(frozen=True)
class EstimatorSpec:
    """One column of the comparison table.

    `mtry` is an integer, a symbolic fraction of p resolved per dataset,
    or "best" for an inner validation sweep. mode picks the aggregation;
    split_mode "completely_random" gives the non-adaptive baseline.
    """

    name: str
    mode: str
    mtry: int | str
    split_mode: str = "impurity"
    min_node_size: int = 1

    def __post_init__(self):
        if self.mode not in ("class_vote", "reg_mean", "prox"):
            raise ValueError(f"bad mode {self.mode!r}")
        if isinstance(self.mtry, str) and self.mtry not in MTRY_SYMBOLS:
            raise ValueError(f"bad mtry symbol {self.mtry!r}")


def default_estimators() -> tuple[EstimatorSpec, ...]:
    """Roster mirroring the standard comparison: class/reg forests at p/3
    and sqrt(p), bagged trees, a completely random forest, and a
    validation-tuned prox estimator."""
    return (
        EstimatorSpec("class_third", "class_vote", "third", min_node_size=1),
        EstimatorSpec("reg_third", "reg_mean", "third", min_node_size=5),
        EstimatorSpec("class_sqrt", "class_vote", "sqrt", min_node_size=1),
        EstimatorSpec("reg_sqrt", "reg_mean", "sqrt", min_node_size=5),
        EstimatorSpec("bagged", "class_vote", "all", min_node_size=1),
        EstimatorSpec("random", "reg_mean", "all", split_mode="completely_random", min_node_size=1),
        EstimatorSpec("prox_best", "prox", "best", min_node_size=5),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    source: str  # synthetic model name, or "csv"
    estimators: tuple[EstimatorSpec, ...] = field(default_factory=default_estimators)
    csv_path: str | None = None
    label_column: str | int = "label"
    true_prob_column: str | None = None  # excluded from CSV features when set
    n_trees: int = 200
    repetitions: int = 10
    train_size: int = 500
    test_size: int = 1000
    train_fraction: float = 0.8
    junk: int = 0
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.estimators:
            raise ValueError("need at least one estimator")
        if self.source == "csv" and not self.csv_path:
            raise ValueError("csv source requires csv_path")
        if self.source != "csv":
            get_model(self.source)

    @property
    def synthetic(self) -> bool:
        return self.source != "csv"


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    stderr: float
    values: tuple[float, ...]


@dataclass(frozen=True)
class EstimatorResult:
    spec: EstimatorSpec
    metrics: dict[str, MetricSummary]
    chosen: tuple[tuple[int, int], ...]  # (mtry, min_node_size) per repetition
    errors: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    results: tuple[EstimatorResult, ...]
    wall_clock_s: float

    def to_dict(self) -> dict:
        return {
            "config": {
                "source": self.config.source,
                "csv_path": self.config.csv_path,
                "label_column": self.config.label_column,
                "true_prob_column": self.config.true_prob_column,
                "estimators": [vars(e) for e in self.config.estimators],
                "n_trees": self.config.n_trees,
                "repetitions": self.config.repetitions,
                "train_size": self.config.train_size,
                "test_size": self.config.test_size,
                "train_fraction": self.config.train_fraction,
                "junk": self.config.junk,
                "seed": self.config.seed,
                "bootstrap": self.config.bootstrap,
            },
            "results": [
                {
                    "name": r.spec.name,
                    "mode": r.spec.mode,
                    "mtry": r.spec.mtry,
                    "split_mode": r.spec.split_mode,
                    "min_node_size": r.spec.min_node_size,
                    "chosen": [{"mtry": m, "min_node_size": ns} for m, ns in r.chosen],
                    "errors": [{"repetition": rep, "message": msg} for rep, msg in r.errors],
                    "metrics": {
                        name: {"mean": s.mean, "stderr": s.stderr, "values": list(s.values)}
                        for name, s in r.metrics.items()
                    },
                }
                for r in self.results
            ],
            "wall_clock_s": self.wall_clock_s,
        }

    def table_rows(self) -> list[dict]:
        rows = []
        for r in self.results:
            row = {"estimator": r.spec.name, "mode": r.spec.mode, "mtry": str(r.spec.mtry)}
            for name, s in r.metrics.items():
                row[f"{name}_mean"] = s.mean
                row[f"{name}_stderr"] = s.stderr
            row["failures"] = len(r.errors)
            rows.append(row)
        return rows


def _rep_seeds(base_seed: int, rep: int, n_words: int = 8) -> list[int]:
    state = np.random.SeedSequence(base_seed, spawn_key=(rep,)).generate_state(
        n_words, dtype=np.uint64
    )
    return [int(s) for s in state]


def _estimator_seeds(base_seed: int, rep: int, est_idx: int) -> list[int]:
    state = np.random.SeedSequence(
        base_seed, spawn_key=(rep, est_idx + 1)
    ).generate_state(2, dtype=np.uint64)
    return [int(s) for s in state]


NODE_SIZE_GRID = (5, 25, 50)


def _fit_predict(
    spec: EstimatorSpec,
    train: Dataset,
    test_features: np.ndarray,
    n_trees: int,
    bootstrap: bool,
    forest_seed: int,
    tune_seed: int,
) -> tuple[np.ndarray, tuple[int, int]]:
    if spec.mtry == "best":
        mtry, node_size = _tune_forest(spec, train, n_trees, bootstrap, tune_seed)
    else:
        mtry = resolve_mtry(spec.mtry, train.p)
        node_size = spec.min_node_size
    params = ForestParams(
        n_trees=n_trees,
        tree=TreeParams(
            mtry=mtry,
            min_node_size=node_size,
            split_mode=spec.split_mode,
            bootstrap=bootstrap,
        ),
        seed=forest_seed,
    )
    forest = train_forest(train, params)
    return forest.predict_proba_batch(test_features, spec.mode), (mtry, node_size)


def _tune_forest(
    spec: EstimatorSpec, train: Dataset, n_trees: int, bootstrap: bool, tune_seed: int
) -> tuple[int, int]:
    """Pick (mtry, node size) on a 25% validation carve-out by empirical
    RMSE; the generating probabilities are never consulted. Node size acts
    as the kernel bandwidth for the prox estimator, so it is swept
    alongside mtry."""
    carve = train_test_split(train, 0.75, tune_seed)
    grid = [(m, ns) for m in tuning_grid(train.p) for ns in NODE_SIZE_GRID]
    seeds = np.random.SeedSequence(tune_seed).generate_state(len(grid), dtype=np.uint64)
    best, best_score = grid[0], np.inf
    for (m, ns), s in zip(grid, seeds):
        params = ForestParams(
            n_trees=n_trees,
            tree=TreeParams(
                mtry=m,
                min_node_size=ns,
                split_mode=spec.split_mode,
                bootstrap=bootstrap,
            ),
            seed=int(s),
        )
        forest = train_forest(carve.train, params)
        preds = forest.predict_proba_batch(carve.test.features, spec.mode)
        score = rmse_empirical(preds, carve.test.labels)
        if score < best_score:
            best, best_score = (m, ns), score
    return best


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    start = time.perf_counter()
    csv_data = None
    if not cfg.synthetic:
        csv_data = load_csv(
            cfg.csv_path, cfg.label_column, true_prob_column=cfg.true_prob_column
        )

    metric_names = (
        ["rmse_true", "rmse_empirical", "test_error"]
        if cfg.synthetic
        else ["rmse_empirical", "test_error"]
    )
    raw = {e.name: {m: [] for m in metric_names} for e in cfg.estimators}
    chosen: dict[str, list[tuple[int, int]]] = {e.name: [] for e in cfg.estimators}
    errors: dict[str, list[tuple[int, str]]] = {e.name: [] for e in cfg.estimators}

    for rep in range(cfg.repetitions):
        seeds = _rep_seeds(cfg.seed, rep)
        if cfg.synthetic:
            model = get_model(cfg.source)
            train = sample(model, cfg.train_size, seeds[0])
            test = sample(model, cfg.test_size, seeds[1])
            if cfg.junk > 0:
                train = augment_junk(train, cfg.junk, seeds[2])
                test = augment_junk(test, cfg.junk, seeds[3])
        else:
            full = csv_data
            if cfg.junk > 0:
                full = augment_junk(full, cfg.junk, seeds[2])
            pair = train_test_split(full, cfg.train_fraction, seeds[4])
            train, test = pair.train, pair.test

        for est_idx, spec in enumerate(cfg.estimators):
            forest_seed, tune_seed = _estimator_seeds(cfg.seed, rep, est_idx)
            try:
                preds, params_used = _fit_predict(
                    spec, train, test.features, cfg.n_trees, cfg.bootstrap,
                    forest_seed, tune_seed,
                )
            except Exception as exc:  # recorded per cell, not fatal to the run
                errors[spec.name].append((rep, f"{type(exc).__name__}: {exc}"))
                continue
            chosen[spec.name].append(params_used)
            if cfg.synthetic:
                raw[spec.name]["rmse_true"].append(rmse_true(preds, test.true_probs))
            raw[spec.name]["rmse_empirical"].append(rmse_empirical(preds, test.labels))
            raw[spec.name]["test_error"].append(misclassification(preds, test.labels))

    results = []
    for spec in cfg.estimators:
        metrics = {}
        for m in metric_names:
            vals = raw[spec.name][m]
            if vals:
                mean = float(np.mean(vals))
                stderr = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
            else:
                mean, stderr = float("nan"), float("nan")
            metrics[m] = MetricSummary(mean=mean, stderr=stderr, values=tuple(vals))
        results.append(
            EstimatorResult(
                spec=spec,
                metrics=metrics,
                chosen=tuple(chosen[spec.name]),
                errors=tuple(errors[spec.name]),
            )
        )
    return ExperimentReport(
        config=cfg,
        results=tuple(results),
        wall_clock_s=time.perf_counter() - start,
    )
