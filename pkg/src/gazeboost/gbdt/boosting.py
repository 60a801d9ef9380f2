"""Gradient boosting: the training loop, the fitted ensemble and its I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, ContractError, SchemaError
from ..features import FeatureMatrix
from .binning import BinMapper, bin_features, transform_matrix
from .config import TrainConfig
from .losses import compute_gradients, initial_score, loss
from .splitting import HistogramBuilder
from .tree import Tree, grow_tree, refine_leaves_mae

MODEL_FORMAT = "gazeboost-model"
MODEL_VERSION = 1

# stream ids for the per-iteration random generators
_BAGGING_STREAM = 1
_FEATURE_STREAM = 2


@dataclass
class Ensemble:
    base_score: float
    trees: list[Tree]
    mappers: list[BinMapper]
    column_names: list[str]
    column_kinds: list[str]
    config: TrainConfig
    best_iteration: int | None = None
    category_dicts: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "base_score": self.base_score,
            "best_iteration": self.best_iteration,
            "config": self.config.to_dict(),
            "columns": [
                {"name": n, "kind": k} for n, k in zip(self.column_names, self.column_kinds)
            ],
            "category_dicts": self.category_dicts,
            "mappers": [m.to_dict() for m in self.mappers],
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Ensemble:
        if data.get("format") != MODEL_FORMAT:
            raise SchemaError("not a model document")
        if data.get("version") != MODEL_VERSION:
            raise SchemaError(f"unsupported model version {data.get('version')}")
        return cls(
            base_score=float(data["base_score"]),
            trees=[Tree.from_dict(t) for t in data["trees"]],
            mappers=[BinMapper.from_dict(m) for m in data["mappers"]],
            column_names=[c["name"] for c in data["columns"]],
            column_kinds=[c["kind"] for c in data["columns"]],
            config=TrainConfig.from_dict(data["config"]),
            best_iteration=data.get("best_iteration"),
            category_dicts={k: dict(v) for k, v in data.get("category_dicts", {}).items()},
        )


def save_model(e: Ensemble, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(e.to_dict(), fh, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> Ensemble:
    with Path(path).open(encoding="utf-8") as fh:
        return Ensemble.from_dict(json.load(fh))


@dataclass
class FitReport:
    train_loss: list[float] = field(default_factory=list)
    valid_loss: list[float] | None = None
    best_iteration: int = 0
    stopped_early: bool = False

    @property
    def n_iter(self) -> int:
        return len(self.train_loss)

    def to_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "valid_loss": self.valid_loss,
            "best_iteration": self.best_iteration,
            "stopped_early": self.stopped_early,
        }


class EarlyStopping:
    """Tracks the best validation loss; iterations are counted from 1."""

    def __init__(self, rounds: int):
        self.rounds = rounds
        self.best_loss = math.inf
        self.best_iteration = 0

    def update(self, iteration: int, value: float) -> bool:
        """Record ``value``; True when training should stop."""
        if value < self.best_loss:
            self.best_loss = value
            self.best_iteration = iteration
        return self.rounds > 0 and iteration - self.best_iteration >= self.rounds


def _rng(seed: int, iteration: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFF, iteration, stream])


def bagging_rows(config: TrainConfig, iteration: int, n_rows: int) -> np.ndarray:
    """Sorted in-bag rows drawn without replacement for ``iteration``."""
    k = max(1, int(config.bagging_fraction * n_rows))
    picked = _rng(config.seed, iteration, _BAGGING_STREAM).choice(n_rows, size=k, replace=False)
    return np.sort(picked)


def feature_subset(config: TrainConfig, iteration: int, n_cols: int) -> np.ndarray | None:
    if config.feature_fraction >= 1.0:
        return None
    k = max(1, int(config.feature_fraction * n_cols + 0.5))
    picked = _rng(config.seed, iteration, _FEATURE_STREAM).choice(n_cols, size=k, replace=False)
    return np.sort(picked)


def fit(
    train: FeatureMatrix,
    y,
    config: TrainConfig,
    valid: FeatureMatrix | None = None,
    y_valid=None,
) -> tuple[Ensemble, FitReport]:
    """Train a boosted ensemble.

    Parameters
    ----------
    train : FeatureMatrix
        Training features.
    y : array-like
        Training targets.
    config : TrainConfig
        Hyperparameters. Early stopping (``early_stopping_rounds > 0``)
        requires a validation set.
    valid, y_valid : FeatureMatrix, array-like, optional
        Validation data, scored after every iteration.

    Returns
    -------
    ensemble : Ensemble
        When early stopping is enabled, ``best_iteration`` is set and
        :func:`predict` uses only the trees up to it.
    report : FitReport
        Per-iteration losses (the objective's own metric) and the
        iteration with the lowest validation loss.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (train.n_rows,):
        raise ContractError("target length does not match the training matrix")
    if not np.all(np.isfinite(y)):
        raise ContractError("training targets must be finite")
    if config.early_stopping_rounds > 0 and valid is None:
        raise ConfigurationError("early stopping requested without a validation set")

    binned = bin_features(train, config.max_bin, config.min_data_in_bin)
    builder = HistogramBuilder(binned.codes, binned.n_bins)
    base = initial_score(config.objective, y)
    pred = np.full(train.n_rows, base)

    report = FitReport()
    if valid is not None:
        y_valid = np.asarray(y_valid, dtype=float)
        if y_valid.shape != (valid.n_rows,):
            raise ContractError("validation target length does not match")
        valid_codes = binned.transform(valid)
        valid_pred = np.full(valid.n_rows, base)
        report.valid_loss = []
    stopper = EarlyStopping(config.early_stopping_rounds)

    trees: list[Tree] = []
    all_rows = np.arange(train.n_rows)
    bag = all_rows
    for it in range(config.n_iter):
        grad, hess = compute_gradients(config.objective, pred, y)
        if config.bagging_enabled and it % config.bagging_freq == 0:
            bag = bagging_rows(config, it, train.n_rows)
        cols = feature_subset(config, it, train.n_cols)
        sampled = cols is not None or len(bag) < train.n_rows
        tree, leaf_rows = grow_tree(binned, grad, hess, config, rows=bag, columns=cols, builder=builder)
        if tree.n_leaves == 1 and not sampled:
            # nothing left to split on the full data; further trees are constant
            break
        if config.objective == "mae":
            refine_leaves_mae(tree, leaf_rows, y - pred)
        tree.scale(config.learning_rate)
        if len(bag) == train.n_rows:
            values = np.asarray(tree.value)
            for leaf, rows in leaf_rows.items():
                pred[rows] += values[leaf]
        else:
            pred += tree.predict_codes(binned.codes)
        trees.append(tree)
        report.train_loss.append(loss(config.objective, pred, y))
        if valid is not None:
            valid_pred += tree.predict_codes(valid_codes)
            value = loss(config.objective, valid_pred, y_valid)
            report.valid_loss.append(value)
            if stopper.update(it + 1, value):
                report.stopped_early = True
                break

    if valid is not None and report.valid_loss:
        report.best_iteration = stopper.best_iteration
    else:
        report.best_iteration = len(trees)
    ensemble = Ensemble(
        base_score=base,
        trees=trees,
        mappers=binned.mappers,
        column_names=list(train.column_names),
        column_kinds=list(train.column_kinds),
        config=config,
        best_iteration=report.best_iteration if config.early_stopping_rounds > 0 else None,
        category_dicts={k: dict(v) for k, v in train.category_dicts.items()},
    )
    return ensemble, report


def predict(e: Ensemble, m: FeatureMatrix, num_iteration: int | None = None) -> np.ndarray:
    """Raw (unclipped) predictions for every row of ``m``.

    Uses the first ``num_iteration`` trees; by default all trees, or the
    trees up to ``best_iteration`` for early-stopped models.
    """
    codes = transform_matrix(e.mappers, e.column_names, e.column_kinds, m)
    if num_iteration is None:
        num_iteration = e.best_iteration if e.best_iteration is not None else e.n_trees
    out = np.full(m.n_rows, e.base_score)
    for tree in e.trees[:num_iteration]:
        out += tree.predict_codes(codes)
    return out


def feature_importance(e: Ensemble) -> dict[str, float]:
    """Total split gain per column over all trees."""
    totals = dict.fromkeys(e.column_names, 0.0)
    for tree in e.trees:
        for node in range(tree.n_nodes):
            if tree.left[node] >= 0:
                totals[e.column_names[tree.column[node]]] += tree.gain[node]
    return totals
