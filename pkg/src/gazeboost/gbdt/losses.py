"""Objectives: gradients, hessians, initial scores and evaluation losses."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, ContractError


def compute_gradients(objective: str, predictions, targets) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of the per-row loss at ``predictions``.

    For ``mae`` the gradient is ``sign(prediction - target)`` (zero at
    equality) with a unit hessian; for ``rmse`` it is the residual
    ``prediction - target``, also with a unit hessian.
    """
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape:
        raise ContractError(
            f"predictions {predictions.shape} and targets {targets.shape} differ"
        )
    diff = predictions - targets
    if objective == "mae":
        grad = np.sign(diff)
    elif objective == "rmse":
        grad = diff
    else:
        raise ConfigurationError(f"unknown objective {objective!r}")
    return grad, np.ones_like(diff)


def initial_score(objective: str, targets) -> float:
    targets = np.asarray(targets, dtype=float)
    if objective == "mae":
        return float(np.median(targets))
    return float(np.mean(targets))


def loss(objective: str, predictions, targets) -> float:
    diff = np.asarray(predictions, dtype=float) - np.asarray(targets, dtype=float)
    if objective == "mae":
        return float(np.mean(np.abs(diff)))
    return float(np.sqrt(np.mean(diff * diff)))
