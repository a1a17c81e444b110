"""Random-forest probability estimation through the proximity-kernel lens."""

from .bench import (
    EstimatorSpec,
    ExperimentConfig,
    ExperimentReport,
    default_estimators,
    misclassification,
    rmse_empirical,
    rmse_true,
    run_experiment,
)
from .data_model import Dataset, SplitPair, augment_junk, load_csv, save_csv, train_test_split
from .diagnostics import (
    DerivativeReport,
    KernelGrid,
    derivative_report,
    directional_derivative,
    half_max_extent,
    kernel_grid,
    prob_histogram,
)
from .forest import Forest, ForestParams, ProximityMatrix, train_forest
from .kernel_lab import (
    LaplaceKernel,
    NaiveKernelSpec,
    bandwidth_sweep,
    breiman_kernel,
    default_bandwidth_grid,
    laplace_eval,
    mc_proximity,
    mc_selection_freq,
    naive_kernel,
    nw_estimate,
    strong_weak_weights,
)
from .synthgen import MODELS, SyntheticModel, ccpf, get_model, sample
from .tree import Split, Tree, TreeParams, best_split, grow_tree, tree_prob

__all__ = [
    "Dataset",
    "SplitPair",
    "load_csv",
    "save_csv",
    "augment_junk",
    "train_test_split",
    "Tree",
    "TreeParams",
    "Split",
    "best_split",
    "grow_tree",
    "tree_prob",
    "Forest",
    "ForestParams",
    "ProximityMatrix",
    "train_forest",
    "NaiveKernelSpec",
    "LaplaceKernel",
    "strong_weak_weights",
    "naive_kernel",
    "mc_selection_freq",
    "mc_proximity",
    "breiman_kernel",
    "laplace_eval",
    "nw_estimate",
    "bandwidth_sweep",
    "default_bandwidth_grid",
    "DerivativeReport",
    "KernelGrid",
    "directional_derivative",
    "derivative_report",
    "kernel_grid",
    "half_max_extent",
    "prob_histogram",
    "SyntheticModel",
    "MODELS",
    "get_model",
    "ccpf",
    "sample",
    "EstimatorSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "default_estimators",
    "run_experiment",
    "rmse_true",
    "rmse_empirical",
    "misclassification",
]

__version__ = "0.1.0"
