"""Dataset container, CSV ingestion, junk-predictor augmentation, and splitting.

Every estimator in this package consumes the same immutable `Dataset`:
an n x p matrix of finite reals plus binary labels in {0, 1}. CSV files
need a header row, UTF-8 encoding, '.' decimals and comma separators.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data (files, labels, shapes)."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with binary labels.

    `true_probs` optionally carries the generating conditional class
    probability for synthetic data; it is None for real data.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    true_probs: np.ndarray | None = field(default=None)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labs = np.asarray(self.labels)
        if feats.ndim != 2:
            raise DataError(f"features must be 2-d, got shape {feats.shape}")
        n, p = feats.shape
        if n < 1 or p < 1:
            raise DataError(f"need at least one row and one column, got {feats.shape}")
        if not np.all(np.isfinite(feats)):
            bad = np.argwhere(~np.isfinite(feats))[0]
            raise DataError(f"non-finite feature value at row {bad[0]}, column {bad[1]}")
        if labs.shape != (n,):
            raise DataError(f"labels must have shape ({n},), got {labs.shape}")
        if not np.isin(labs, (0, 1)).all():
            raise DataError("labels must contain only 0 and 1")
        if len(self.feature_names) != p:
            raise DataError(
                f"expected {p} feature names, got {len(self.feature_names)}"
            )
        object.__setattr__(self, "features", _frozen(feats))
        object.__setattr__(self, "labels", _frozen(labs.astype(np.int64)))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.true_probs is not None:
            tp = np.asarray(self.true_probs, dtype=np.float64)
            if tp.shape != (n,):
                raise DataError(f"true_probs must have shape ({n},), got {tp.shape}")
            object.__setattr__(self, "true_probs", _frozen(tp))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """New Dataset restricted to the given row indices (order kept)."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            features=self.features[rows],
            labels=self.labels[rows],
            feature_names=self.feature_names,
            true_probs=None if self.true_probs is None else self.true_probs[rows],
        )


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset


def load_csv(
    path: str | Path,
    label_column: str | int,
    true_prob_column: str | None = None,
) -> Dataset:
    """Read a Dataset from a CSV file.

    The label column may hold {0, 1} directly or any two distinct values;
    two distinct values are mapped to 0/1 by sorted order (numeric order
    when both parse as numbers, string order otherwise). A `true_prob`
    companion column (as written by `simulate`) can be pulled out of the
    feature set by name via `true_prob_column`.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        rows = [r for r in reader if r]

    header = [h.strip() for h in header]
    if isinstance(label_column, int):
        if not 0 <= label_column < len(header):
            raise DataError(f"label column index {label_column} out of range")
        label_idx = label_column
    else:
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)

    skip = {label_idx}
    tp_idx = None
    if true_prob_column is not None:
        if true_prob_column not in header:
            raise DataError(f"true-prob column {true_prob_column!r} not in header")
        tp_idx = header.index(true_prob_column)
        skip.add(tp_idx)

    feat_idx = [j for j in range(len(header)) if j not in skip]
    if not feat_idx:
        raise DataError(f"{path}: no feature columns left")
    names = tuple(header[j] for j in feat_idx)

    n = len(rows)
    feats = np.empty((n, len(feat_idx)), dtype=np.float64)
    raw_labels = []
    tps = np.empty(n) if true_prob_column is not None else None
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i} has {len(row)} cells, expected {len(header)}")
        for k, j in enumerate(feat_idx):
            try:
                feats[i, k] = float(row[j])
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric feature cell at row {i}, column {header[j]!r}"
                ) from None
        raw_labels.append(row[label_idx].strip())
        if tps is not None:
            tps[i] = float(row[tp_idx])

    labels = _map_labels(raw_labels)
    return Dataset(features=feats, labels=labels, feature_names=names, true_probs=tps)


def _map_labels(raw: list[str]) -> np.ndarray:
    distinct = sorted(set(raw))
    if len(distinct) != 2:
        raise DataError(
            f"label column must hold exactly 2 distinct values, found {len(distinct)}: "
            f"{distinct[:5]}"
        )
    try:
        ordered = sorted(distinct, key=float)
    except ValueError:
        ordered = distinct
    mapping = {ordered[0]: 0, ordered[1]: 1}
    return np.array([mapping[v] for v in raw], dtype=np.int64)


def save_csv(d: Dataset, path: str | Path, label_name: str = "label") -> None:
    """Write a Dataset to CSV; includes a true_prob column when present."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(d.feature_names) + [label_name]
        if d.true_probs is not None:
            header.append("true_prob")
        writer.writerow(header)
        for i in range(d.n):
            row = [repr(float(v)) for v in d.features[i]] + [str(int(d.labels[i]))]
            if d.true_probs is not None:
                row.append(repr(float(d.true_probs[i])))
            writer.writerow(row)


def augment_junk(d: Dataset, count: int, seed: int) -> Dataset:
    """Append `count` junk predictors, each a random permutation of one
    original column.

    Source columns are drawn without replacement until all p originals are
    used, then with replacement. Permuting keeps each junk column's marginal
    distribution while destroying any association with the labels.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    sources = []
    remaining = count
    while remaining > 0:
        block = min(remaining, d.p)
        sources.extend(rng.choice(d.p, size=block, replace=False).tolist())
        remaining -= block
    junk_cols = np.empty((d.n, count))
    names = list(d.feature_names)
    for k, src in enumerate(sources):
        junk_cols[:, k] = d.features[rng.permutation(d.n), src]
        names.append(f"{d.feature_names[src]}_junk_{k + 1}")
    return Dataset(
        features=np.hstack([d.features, junk_cols]),
        labels=d.labels,
        feature_names=tuple(names),
        true_probs=d.true_probs,
    )


def train_test_split(d: Dataset, train_fraction: float, seed: int) -> SplitPair:
    """Uniform random row partition, deterministic for a given seed."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n_train = int(round(d.n * train_fraction))
    if n_train < 1 or n_train > d.n - 1:
        raise ValueError(
            f"fraction {train_fraction} leaves an empty side for n={d.n}"
        )
    perm = np.random.default_rng(seed).permutation(d.n)
    return SplitPair(
        train=d.subset(np.sort(perm[:n_train])),
        test=d.subset(np.sort(perm[n_train:])),
    )
