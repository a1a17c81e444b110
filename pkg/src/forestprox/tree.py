"""Single binary-label decision tree.

Growth draws `mtry` candidate features per node and either minimizes a
split criterion over midpoint thresholds (impurity mode) or draws the
feature and threshold uniformly at random (completely_random mode).
Leaves keep their training rows and label counts so per-tree probability
estimates and leaf co-occupancy can be read back out.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .data_model import Dataset

SPLIT_MODES = ("impurity", "completely_random")
CRITERIA = ("gini", "mse")

# Resolves float noise when two splits have algebraically equal scores; far
# below the smallest nonzero score gap for the node sizes handled here.
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class TreeParams:
    mtry: int
    min_node_size: int = 1
    max_leaves: int | None = None
    split_mode: str = "impurity"
    bootstrap: bool = True
    criterion: str = "gini"

    def __post_init__(self):
        if self.mtry < 1:
            raise ValueError(f"mtry must be >= 1, got {self.mtry}")
        if self.min_node_size < 1:
            raise ValueError(f"min_node_size must be >= 1, got {self.min_node_size}")
        if self.max_leaves is not None and self.max_leaves < 1:
            raise ValueError(f"max_leaves must be >= 1, got {self.max_leaves}")
        if self.split_mode not in SPLIT_MODES:
            raise ValueError(f"split_mode must be one of {SPLIT_MODES}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")

    def check_dimension(self, p: int) -> None:
        if self.mtry > p:
            raise ValueError(f"mtry={self.mtry} exceeds feature count p={p}")


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left_rows: np.ndarray
    right_rows: np.ndarray
    score: float


@dataclass
class Tree:
    """Flat-array binary tree; node 0 is the root.

    Internal nodes have `feature >= 0`; leaves have feature -1 and carry
    (n, positives, rows) where rows are the in-node training row indices
    (with bootstrap multiplicity when grown from a bootstrap sample).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    node_depth: np.ndarray
    leaf_n: np.ndarray
    leaf_pos: np.ndarray
    leaf_rows: list
    seed: int
    n_features: int = field(default=0)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def leaf_count(self) -> int:
        return int((self.feature < 0).sum())

    @property
    def depth(self) -> int:
        return int(self.node_depth[self.feature < 0].max())

    def locate(self, x: np.ndarray) -> int:
        """Leaf node index containing x."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected {self.n_features} coordinates, got {x.shape}")
        i = 0
        while self.feature[i] >= 0:
            i = self.left[i] if x[self.feature[i]] <= self.threshold[i] else self.right[i]
        return i

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index for every row of X (vectorized routing)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected (q, {self.n_features}) matrix, got {X.shape}")
        out = np.empty(X.shape[0], dtype=np.int64)
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if self.feature[node] < 0:
                out[idx] = node
                continue
            mask = X[idx, self.feature[node]] <= self.threshold[node]
            l_idx, r_idx = idx[mask], idx[~mask]
            if l_idx.size:
                stack.append((int(self.left[node]), l_idx))
            if r_idx.size:
                stack.append((int(self.right[node]), r_idx))
        return out

    def prob(self, x: np.ndarray) -> float:
        leaf = self.locate(x)
        return float(self.leaf_pos[leaf]) / float(self.leaf_n[leaf])

    def to_dict(self) -> dict:
        """Nested inspection structure; see README for the field contract."""
        children: dict[int, dict] = {}
        # build bottom-up so no recursion is needed on deep trees
        for i in range(self.n_nodes - 1, -1, -1):
            if self.feature[i] < 0:
                children[i] = {
                    "n": int(self.leaf_n[i]),
                    "positives": int(self.leaf_pos[i]),
                    "rows": [int(r) for r in self.leaf_rows[i]],
                }
            else:
                children[i] = {
                    "feature": int(self.feature[i]),
                    "threshold": float(self.threshold[i]),
                    "left": children[int(self.left[i])],
                    "right": children[int(self.right[i])],
                }
        return {"seed": self.seed, "n_features": self.n_features, "root": children[0]}

    @classmethod
    def from_dict(cls, payload: dict) -> "Tree":
        feature, threshold, left, right, depth = [], [], [], [], []
        leaf_n, leaf_pos, leaf_rows = [], [], []

        def new_node(d: int) -> int:
            feature.append(-1)
            threshold.append(np.nan)
            left.append(-1)
            right.append(-1)
            depth.append(d)
            leaf_n.append(0)
            leaf_pos.append(0)
            leaf_rows.append(None)
            return len(feature) - 1

        queue = deque([(payload["root"], new_node(0))])
        while queue:
            node, idx = queue.popleft()
            if "feature" in node:
                feature[idx] = int(node["feature"])
                threshold[idx] = float(node["threshold"])
                left[idx] = new_node(depth[idx] + 1)
                right[idx] = new_node(depth[idx] + 1)
                queue.append((node["left"], left[idx]))
                queue.append((node["right"], right[idx]))
            else:
                leaf_n[idx] = int(node["n"])
                leaf_pos[idx] = int(node["positives"])
                leaf_rows[idx] = np.asarray(node["rows"], dtype=np.int64)
        return cls(
            feature=np.asarray(feature, dtype=np.int32),
            threshold=np.asarray(threshold, dtype=np.float64),
            left=np.asarray(left, dtype=np.int32),
            right=np.asarray(right, dtype=np.int32),
            node_depth=np.asarray(depth, dtype=np.int32),
            leaf_n=np.asarray(leaf_n, dtype=np.int64),
            leaf_pos=np.asarray(leaf_pos, dtype=np.int64),
            leaf_rows=leaf_rows,
            seed=int(payload.get("seed", 0)),
            n_features=int(payload["n_features"]),
        )


def tree_prob(t: Tree, x: np.ndarray) -> float:
    """Per-tree probability estimate: positive fraction of x's leaf."""
    return t.prob(x)


def _split_scores(xs, ys, total_pos, criterion):
    """Score every boundary between consecutive sorted values, one column
    per candidate feature. Invalid boundaries (equal values) score +inf."""
    m = xs.shape[0]
    nl = np.arange(1, m, dtype=np.float64)[:, None]
    nr = float(m) - nl
    pos_l = np.cumsum(ys, axis=0)[:-1].astype(np.float64)
    pos_r = float(total_pos) - pos_l
    pl = pos_l / nl
    pr = pos_r / nr
    if criterion == "gini":
        score = nl * pl * (1.0 - pl) + nr * pr * (1.0 - pr)
    else:
        score = (
            pos_l * (1.0 - pl) ** 2
            + (nl - pos_l) * pl**2
            + pos_r * (1.0 - pr) ** 2
            + (nr - pos_r) * pr**2
        )
    return np.where(xs[1:] != xs[:-1], score, np.inf)


def best_split(
    rows: np.ndarray,
    d: Dataset,
    candidates: np.ndarray,
    criterion: str = "gini",
) -> Split | None:
    """Best split over the candidate features under the given criterion.

    Thresholds are midpoints between consecutive distinct sorted in-node
    values. Ties are broken toward the lowest feature index, then the
    lowest threshold. Returns None for pure nodes and for nodes where no
    candidate feature has two distinct values.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("rows must be nonempty")
    cand = np.unique(np.asarray(candidates, dtype=np.int64))
    if cand.size == 0:
        raise ValueError("candidates must be nonempty")
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    m = rows.size
    yv = d.labels[rows]
    total_pos = int(yv.sum())
    if m < 2 or total_pos == 0 or total_pos == m:
        return None

    Xs = d.features[rows][:, cand]
    order = np.argsort(Xs, axis=0, kind="stable")
    xs = np.take_along_axis(Xs, order, axis=0)
    ys = yv[order]
    score = _split_scores(xs, ys, total_pos, criterion)

    col_min = score.min(axis=0)
    best = col_min.min()
    if not np.isfinite(best):
        return None
    eps = _TIE_EPS * max(1.0, float(m))
    col = int(np.argmax(col_min <= best + eps))
    row = int(np.argmax(score[:, col] <= col_min[col] + eps))

    lo = float(xs[row, col])
    hi = float(xs[row + 1, col])
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:  # adjacent floats; keep both sides nonempty
        thr = lo
    j = int(cand[col])
    mask = d.features[rows, j] <= thr
    return Split(
        feature=j,
        threshold=thr,
        left_rows=rows[mask],
        right_rows=rows[~mask],
        score=float(score[row, col]),
    )


def _random_split(rows: np.ndarray, d: Dataset, rng: np.random.Generator) -> Split | None:
    """Uniform feature among those with spread in-node, uniform threshold
    inside that feature's in-node value range."""
    sub = d.features[rows]
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    eligible = np.flatnonzero(hi > lo)
    if eligible.size == 0:
        return None
    j = int(eligible[rng.integers(eligible.size)])
    thr = float(rng.uniform(lo[j], hi[j]))
    if not lo[j] < thr < hi[j]:
        return None
    mask = sub[:, j] <= thr
    if mask.all() or not mask.any():
        return None
    left, right = rows[mask], rows[~mask]
    yl, yr = d.labels[left], d.labels[right]
    pl, pr = yl.mean(), yr.mean()
    score = len(left) * pl * (1 - pl) + len(right) * pr * (1 - pr)
    return Split(j, thr, left, right, float(score))


def grow_tree(d: Dataset, params: TreeParams, seed: int) -> Tree:
    """Grow a tree breadth-first, deterministically for a given seed.

    A node becomes a leaf when it is pure, smaller than twice
    min_node_size, the leaf budget is exhausted, or no usable split
    exists among the drawn candidates.
    """
    params.check_dimension(d.p)
    rng = np.random.default_rng(seed)
    n, p = d.n, d.p
    base_rows = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)

    feature, threshold, left, right, depth = [], [], [], [], []
    leaf_n, leaf_pos, leaf_rows = [], [], []

    def new_node(dpt: int) -> int:
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        depth.append(dpt)
        leaf_n.append(0)
        leaf_pos.append(0)
        leaf_rows.append(None)
        return len(feature) - 1

    queue = deque([(new_node(0), base_rows)])
    n_leaves = 1
    while queue:
        idx, rows = queue.popleft()
        m = rows.size
        pos = int(d.labels[rows].sum())
        budget_ok = params.max_leaves is None or n_leaves < params.max_leaves
        split = None
        if budget_ok and m >= 2 * params.min_node_size and 0 < pos < m:
            if params.split_mode == "impurity":
                cand = rng.choice(p, size=min(params.mtry, p), replace=False)
                split = best_split(rows, d, cand, params.criterion)
            else:
                split = _random_split(rows, d, rng)
        if split is None:
            leaf_n[idx] = m
            leaf_pos[idx] = pos
            leaf_rows[idx] = rows
            continue
        feature[idx] = split.feature
        threshold[idx] = split.threshold
        left[idx] = new_node(depth[idx] + 1)
        right[idx] = new_node(depth[idx] + 1)
        n_leaves += 1
        queue.append((left[idx], split.left_rows))
        queue.append((right[idx], split.right_rows))

    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        node_depth=np.asarray(depth, dtype=np.int32),
        leaf_n=np.asarray(leaf_n, dtype=np.int64),
        leaf_pos=np.asarray(leaf_pos, dtype=np.int64),
        leaf_rows=leaf_rows,
        seed=int(seed),
        n_features=p,
    )
