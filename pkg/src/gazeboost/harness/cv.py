"""Sentence-level k-fold cross-validation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..corpus import SentenceSet
from ..errors import ConfigurationError, ContractError, PolicyError
from ..features import FeatureMatrix
from ..gbdt import TrainConfig, fit, predict
from .metrics import clip_predictions, mae


@dataclass(frozen=True)
class CvSplit:
    k: int
    fold_of: Mapping[int, int]

    def folds(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for sid, f in self.fold_of.items():
            out[f].append(sid)
        return out

    def row_folds(self, sentence_ids: Sequence[int]) -> np.ndarray:
        try:
            return np.array([self.fold_of[int(s)] for s in sentence_ids], dtype=np.int64)
        except KeyError as exc:
            raise ContractError(f"sentence {exc.args[0]} is not covered by the split") from None

    def to_dict(self) -> dict:
        return {"k": self.k, "fold_of": {str(s): f for s, f in sorted(self.fold_of.items())}}


def kfold_by_sentence(sentences: SentenceSet | Sequence[int], k: int = 5, seed: int = 0) -> CvSplit:
    """Shuffle the sentences with ``seed`` and deal them round-robin into
    ``k`` folds, so every token of a sentence lands in the same fold."""
    ids = sentences.sentence_ids if isinstance(sentences, SentenceSet) else list(sentences)
    if k < 2:
        raise ConfigurationError("k must be at least 2")
    if k > len(ids):
        raise ConfigurationError(f"k={k} exceeds the number of sentences ({len(ids)})")
    order = np.random.default_rng(seed).permutation(len(ids))
    return CvSplit(k=k, fold_of={int(ids[i]): pos % k for pos, i in enumerate(order)})


@dataclass
class CvResult:
    fold_mae: list[float]
    best_iterations: list[int]
    fold_pred: np.ndarray | None = field(default=None, repr=False)

    @property
    def mean_mae(self) -> float:
        return float(np.mean(self.fold_mae))

    def to_dict(self) -> dict:
        return {
            "mean_mae": self.mean_mae,
            "fold_mae": self.fold_mae,
            "best_iterations": self.best_iterations,
        }


def _config_for(config, dv: str) -> TrainConfig:
    if isinstance(config, TrainConfig):
        return config
    try:
        return config[dv]
    except KeyError:
        raise ConfigurationError(f"no training configuration for {dv}") from None


def cross_validate(
    m: FeatureMatrix,
    targets: Mapping[str, np.ndarray],
    config: TrainConfig | Mapping[str, TrainConfig],
    split: CvSplit,
    n_jobs: int = 1,
) -> dict[str, CvResult]:
    """Per-measure k-fold CV with the held-out fold as early-stopping set.

    Each fold model is scored on its held-out fold after clipping the
    predictions to the target range. ``config`` is either one shared
    configuration or one per measure. Out-of-fold predictions are kept in
    ``CvResult.fold_pred``.
    """
    folds = split.row_folds(m.sentence_ids)
    jobs = [(dv, f) for dv in targets for f in range(split.k)]

    def run(job):
        dv, f = job
        y = np.asarray(targets[dv], dtype=float)
        if y.shape != (m.n_rows,):
            raise ContractError(f"{dv}: target length does not match the matrix")
        tr, va = folds != f, folds == f
        if not va.any():
            raise ContractError(f"fold {f} is empty")
        cfg = _config_for(config, dv)
        ensemble, report = fit(m.take_rows(tr), y[tr], cfg, m.take_rows(va), y[va])
        pred = clip_predictions(predict(ensemble, m.take_rows(va)))
        return mae(pred, y[va]), report.best_iteration, pred

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]

    results = {}
    for dv in targets:
        oof = np.empty(m.n_rows)
        fold_mae, best = [], []
        for (jdv, f), (err, it, pred) in zip(jobs, outcomes):
            if jdv == dv:
                fold_mae.append(err)
                best.append(int(it))
                oof[folds == f] = pred
        results[dv] = CvResult(fold_mae=fold_mae, best_iterations=best, fold_pred=oof)
    return results


def pick_n_iter(fold_best_iters: Sequence[int], rank: int = 4) -> int:
    """The ``rank``-th highest per-fold best iteration (4th by default)."""
    values = sorted((int(v) for v in fold_best_iters), reverse=True)
    if len(values) < rank:
        raise PolicyError(f"need at least {rank} folds, got {len(values)}")
    return values[rank - 1]
