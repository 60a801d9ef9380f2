"""Random search over a finite hyperparameter grid."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..errors import ConfigurationError
from ..features import FeatureMatrix
from ..gbdt import TrainConfig
from .cv import CvSplit, cross_validate

MAX_REDRAWS = 20


def submission_grid() -> dict[str, list]:
    """The first-round search grid used for the submitted systems."""
    return {
        "max_bin": [16, 32, 48, 64, 80, 96, 112, 128, 160, 192, 224, 256],
        "min_data_in_bin": [2, 3, 4, 5, 6, 8, 10, 12, 15, 20],
        "num_leaves": [4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15, 18, 21, 25, 30],
        "learning_rate": [0.005, 0.007, 0.009, 0.011, 0.014, 0.018, 0.022, 0.026, 0.03, 0.035, 0.05],
        "min_data_in_leaf": [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15, 18, 21, 25, 30],
        "max_depth": [3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, -1],
        "feature_fraction": [float(v) for v in np.linspace(0.01, 0.90, 91)],
        "bagging_freq": list(range(3, 7, 1)),
        "bagging_fraction": [float(v) for v in np.linspace(0.50, 0.90, 9)],
    }


@dataclass(frozen=True)
class SearchSpace:
    params: Mapping[str, Sequence[Any]]

    def __post_init__(self):
        known = {f.name for f in fields(TrainConfig)}
        unknown = sorted(set(self.params) - known)
        if unknown:
            raise ConfigurationError(f"search space names unknown parameters: {unknown}")
        empty = [k for k, v in self.params.items() if len(v) == 0]
        if empty:
            raise ConfigurationError(f"empty candidate lists: {empty}")

    @classmethod
    def submission(cls) -> SearchSpace:
        return cls(submission_grid())

    @classmethod
    def from_json(cls, path: str | Path) -> SearchSpace:
        with Path(path).open(encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: search space must be a JSON object")
        return cls({k: list(v) for k, v in data.items()})

    def to_json(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump({k: list(v) for k, v in self.params.items()}, fh, indent=1)
            fh.write("\n")

    def sample(self, rng: np.random.Generator) -> dict[str, Any]:
        return {name: values[int(rng.integers(len(values)))] for name, values in self.params.items()}


@dataclass
class Trial:
    params: dict[str, Any]
    fold_mae: list[float]

    @property
    def mean_mae(self) -> float:
        return float(np.mean(self.fold_mae))

    def to_dict(self) -> dict:
        return {"params": self.params, "fold_mae": self.fold_mae, "mean_mae": self.mean_mae}


@dataclass
class TuneReport:
    trials: list[Trial] = field(default_factory=list)

    @property
    def best_index(self) -> int:
        return int(np.argmin([t.mean_mae for t in self.trials]))

    @property
    def best(self) -> Trial:
        return self.trials[self.best_index]

    def to_dict(self) -> dict:
        return {"best_index": self.best_index, "trials": [t.to_dict() for t in self.trials]}


def draw_configs(space: SearchSpace, trials: int, seed: int) -> list[dict[str, Any]]:
    """Independent uniform draws; repeats are redrawn a bounded number of times."""
    rng = np.random.default_rng(seed)
    seen: set[tuple] = set()
    out = []
    for _ in range(trials):
        for _attempt in range(MAX_REDRAWS + 1):
            params = space.sample(rng)
            key = tuple(sorted((k, repr(v)) for k, v in params.items()))
            if key not in seen:
                break
        seen.add(key)
        out.append(params)
    return out


def random_search(
    space: SearchSpace,
    trials: int,
    seed: int,
    evaluator: Callable[[dict[str, Any]], Sequence[float]],
    n_jobs: int = 1,
) -> TuneReport:
    """Evaluate ``trials`` random configurations and keep them all.

    ``evaluator`` maps a parameter dict to per-fold MAEs. Configurations
    are drawn up front, so the report does not depend on ``n_jobs``.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    configs = draw_configs(space, trials, seed)
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            scores = list(pool.map(evaluator, configs))
    else:
        scores = [evaluator(c) for c in configs]
    return TuneReport([Trial(dict(c), [float(s) for s in sc]) for c, sc in zip(configs, scores)])


def cv_evaluator(
    m: FeatureMatrix,
    targets: Mapping[str, np.ndarray],
    base: TrainConfig,
    split: CvSplit,
    n_jobs: int = 1,
) -> Callable[[dict[str, Any]], list[float]]:
    """Evaluator running sentence-level CV; with several measures the
    per-fold MAEs are averaged across them."""

    def evaluate(params: dict[str, Any]) -> list[float]:
        config = TrainConfig.from_dict({**base.to_dict(), **params})
        results = cross_validate(m, targets, config, split, n_jobs=n_jobs)
        per_fold = np.mean([r.fold_mae for r in results.values()], axis=0)
        return per_fold.tolist()

    return evaluate
