"""Training configuration for the boosted-tree regressor."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

from ..errors import ConfigurationError

OBJECTIVES = ("mae", "rmse")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one boosting run.

    Field names follow the LightGBM parameter names. ``max_depth=None``
    means unlimited depth; ``-1`` is accepted on input and normalized to
    None. ``early_stopping_rounds=0`` disables early stopping.
    """

    objective: str = "mae"
    learning_rate: float = 0.1
    num_leaves: int = 31
    max_depth: int | None = None
    max_bin: int = 255
    min_data_in_bin: int = 3
    min_data_in_leaf: int = 20
    feature_fraction: float = 1.0
    bagging_fraction: float = 1.0
    bagging_freq: int = 0
    n_iter: int = 100
    early_stopping_rounds: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth <= 0:
            object.__setattr__(self, "max_depth", None)
        problems = []
        if self.objective not in OBJECTIVES:
            problems.append(f"objective must be one of {OBJECTIVES}")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            problems.append("learning_rate must be positive")
        if self.num_leaves < 2:
            problems.append("num_leaves must be >= 2")
        if self.max_bin < 2:
            problems.append("max_bin must be >= 2")
        if self.min_data_in_bin < 1:
            problems.append("min_data_in_bin must be >= 1")
        if self.min_data_in_leaf < 1:
            problems.append("min_data_in_leaf must be >= 1")
        if not 0 < self.feature_fraction <= 1:
            problems.append("feature_fraction must be in (0, 1]")
        if not 0 < self.bagging_fraction <= 1:
            problems.append("bagging_fraction must be in (0, 1]")
        if self.bagging_freq < 0:
            problems.append("bagging_freq must be >= 0")
        if self.n_iter < 1:
            problems.append("n_iter must be >= 1")
        if self.early_stopping_rounds < 0:
            problems.append("early_stopping_rounds must be >= 0")
        if problems:
            raise ConfigurationError("; ".join(problems))

    @property
    def bagging_enabled(self) -> bool:
        return self.bagging_freq > 0 and self.bagging_fraction < 1.0

    def replace(self, **changes: Any) -> TrainConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> TrainConfig:
        data = dict(data)
        if "max_leaves" in data:
            data["num_leaves"] = data.pop("max_leaves")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown training parameters: {unknown}")
        for key in ("num_leaves", "max_bin", "min_data_in_bin", "min_data_in_leaf",
                    "bagging_freq", "n_iter", "early_stopping_rounds", "seed"):
            if key in data:
                data[key] = int(data[key])
        if data.get("max_depth") is not None:
            data["max_depth"] = int(data["max_depth"])
        for key in ("learning_rate", "feature_fraction", "bagging_fraction"):
            if key in data:
                data[key] = float(data[key])
        return cls(**data)


# Submitted configurations; unlisted parameters stay at their defaults.
RUN1 = TrainConfig(
    objective="mae",
    bagging_fraction=0.66,
    bagging_freq=5,
    feature_fraction=0.09,
    learning_rate=0.0095,
    max_depth=11,
    max_bin=64,
    min_data_in_bin=2,
    num_leaves=11,
    min_data_in_leaf=7,
    n_iter=4800,
)

RUN2 = TrainConfig(
    objective="mae",
    bagging_fraction=0.70,
    bagging_freq=5,
    feature_fraction=0.85,
    learning_rate=0.0050,
    max_depth=None,
    max_bin=64,
    min_data_in_bin=5,
    num_leaves=30,
    min_data_in_leaf=5,
)

# Final per-measure iteration counts of the second run.
RUN2_N_ITER = {"nFix": 3740, "FFD": 3497, "GPT": 2861, "TRT": 3829, "fixProp": 3305}
