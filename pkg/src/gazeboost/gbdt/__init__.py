"""Histogram-based gradient-boosted regression trees."""

from .binning import BinMapper, BinnedDataset, bin_features
from .boosting import (
    EarlyStopping,
    Ensemble,
    FitReport,
    feature_importance,
    fit,
    load_model,
    predict,
    save_model,
)
from .config import RUN1, RUN2, RUN2_N_ITER, TrainConfig
from .losses import compute_gradients
from .splitting import Histogram, HistogramBuilder, SplitInfo, find_best_split
from .tree import Tree, grow_tree, refine_leaves_mae

__all__ = [
    "BinMapper",
    "BinnedDataset",
    "EarlyStopping",
    "Ensemble",
    "FitReport",
    "Histogram",
    "HistogramBuilder",
    "RUN1",
    "RUN2",
    "RUN2_N_ITER",
    "SplitInfo",
    "TrainConfig",
    "Tree",
    "bin_features",
    "compute_gradients",
    "feature_importance",
    "find_best_split",
    "fit",
    "grow_tree",
    "load_model",
    "predict",
    "refine_leaves_mae",
    "save_model",
]
