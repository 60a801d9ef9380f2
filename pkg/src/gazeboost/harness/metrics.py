"""Error metrics, clipping and the official challenge score."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..corpus import DVS, TARGET_RANGE
from ..errors import ContractError, UndefinedStatisticError


def _pair(pred, y) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=float)
    y = np.asarray(y, dtype=float)
    if pred.shape != y.shape or pred.ndim != 1:
        raise ContractError(f"shape mismatch: {pred.shape} vs {y.shape}")
    if pred.size == 0:
        raise ContractError("empty vectors")
    return pred, y


def mae(pred, y) -> float:
    pred, y = _pair(pred, y)
    return float(np.mean(np.abs(pred - y)))


def rmse(pred, y) -> float:
    pred, y = _pair(pred, y)
    return float(np.sqrt(np.mean((pred - y) ** 2)))


def pearson(pred, y) -> float:
    pred, y = _pair(pred, y)
    dp = pred - pred.mean()
    dy = y - y.mean()
    sp, sy = np.sqrt(dp @ dp), np.sqrt(dy @ dy)
    if sp == 0 or sy == 0:
        raise UndefinedStatisticError("Pearson r undefined for a constant vector")
    return float(np.clip((dp @ dy) / (sp * sy), -1.0, 1.0))


def clip_predictions(pred, lo: float = TARGET_RANGE[0], hi: float = TARGET_RANGE[1]) -> np.ndarray:
    return np.clip(np.asarray(pred, dtype=float), lo, hi)


def official_score(per_dv_mae: Sequence[float] | Mapping[str, float]) -> float:
    """Mean of the five per-measure MAEs."""
    if isinstance(per_dv_mae, Mapping):
        per_dv_mae = [per_dv_mae[dv] for dv in DVS]
    values = np.asarray(per_dv_mae, dtype=float)
    if values.shape != (len(DVS),) or not np.all(np.isfinite(values)):
        raise ContractError("official score needs five finite MAEs")
    return float(values.mean())


def percent_deviation(reference: float, value: float) -> float:
    """Signed change relative to the reference; worse-than-reference is negative."""
    return (reference - value) / reference * 100.0


def percent_deviation_of_value(reference: float, value: float) -> float:
    """Same difference, expressed relative to the compared value."""
    return (reference - value) / value * 100.0
