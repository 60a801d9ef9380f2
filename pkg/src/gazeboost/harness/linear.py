"""Stepwise OLS baseline on log-augmented features."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import stats

from ..features import CATEGORICAL, FeatureMatrix
from .cv import CvResult, CvSplit
from .metrics import clip_predictions, mae


@dataclass(frozen=True)
class Augmentation:
    """Columns produced from a training matrix, reusable on new matrices."""

    source_columns: tuple[str, ...]
    numeric: tuple[str, ...]
    log_columns: tuple[str, ...]
    one_hot: tuple[tuple[str, int], ...]

    @property
    def names(self) -> list[str]:
        return (
            list(self.numeric)
            + [f"log({c})" for c in self.log_columns]
            + [f"{c}={v}" for c, v in self.one_hot]
        )


def fit_augmentation(m: FeatureMatrix) -> Augmentation:
    numeric, logs, one_hot = [], [], []
    for j, (name, kind) in enumerate(zip(m.column_names, m.column_kinds)):
        col = m.values[:, j]
        seen = col[~np.isnan(col)]
        if kind == CATEGORICAL:
            one_hot.extend((name, int(v)) for v in np.unique(seen))
            continue
        numeric.append(name)
        if seen.size and np.all(seen > 0):
            logs.append(name)
    return Augmentation(tuple(m.column_names), tuple(numeric), tuple(logs), tuple(one_hot))


def augment_log_features(m: FeatureMatrix, augmentation: Augmentation | None = None) -> FeatureMatrix:
    """Linear-model design: numeric columns, natural logs of the columns whose
    observed values are all positive, one-hot categories, missing cells as 0.

    The augmentation is fitted on ``m`` unless one (from a training matrix)
    is given.
    """
    if augmentation is None:
        augmentation = fit_augmentation(m)
    cols = [m.column(c) for c in augmentation.numeric]
    for c in augmentation.log_columns:
        x = m.column(c)
        out = np.full(x.shape, np.nan)
        np.log(x, out=out, where=x > 0)
        cols.append(out)
    for c, v in augmentation.one_hot:
        cols.append((m.column(c) == v).astype(float))
    values = np.column_stack(cols) if cols else np.empty((m.n_rows, 0))
    values = np.where(np.isnan(values), 0.0, values)
    names = augmentation.names
    source_group = dict(m.group_of)
    group_of = {}
    for n in names:
        base = n[4:-1] if n.startswith("log(") else n.split("=", 1)[0]
        group_of[n] = source_group[base]
    return FeatureMatrix(
        column_names=names,
        column_kinds=["numeric"] * len(names),
        group_of=group_of,
        values=values,
        row_keys=list(m.row_keys),
    )


@dataclass
class LinearModel:
    intercept: float
    coefficients: dict[str, float] = field(default_factory=dict)
    p_values: dict[str, float] = field(default_factory=dict)
    steps: list[tuple[str, str, float]] = field(default_factory=list)

    @property
    def selected(self) -> list[str]:
        return list(self.coefficients)

    def predict(self, m: FeatureMatrix) -> np.ndarray:
        out = np.full(m.n_rows, self.intercept)
        for name, coef in self.coefficients.items():
            out += coef * m.column(name)
        return out


def _ols(X: np.ndarray, y: np.ndarray):
    """Intercept-augmented OLS: coefficients and two-sided p-values
    (intercept excluded from the p-values)."""
    n, p = X.shape
    design = np.column_stack([np.ones(n), X])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    df = n - p - 1
    if p == 0 or df <= 0:
        return beta, np.ones(p)
    sigma2 = resid @ resid / df
    cov = sigma2 * np.linalg.pinv(design.T @ design)
    se = np.sqrt(np.maximum(np.diag(cov)[1:], 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta[1:] / se
    pv = 2.0 * stats.t.sf(np.abs(t), df)
    pv = np.where(se > 0, pv, np.where(beta[1:] != 0, 0.0, 1.0))
    return beta, pv


class _Residuals:
    """Residuals of y and of every column after projecting out the intercept
    and the selected columns, updated one entered column at a time."""

    def __init__(self, X: np.ndarray, y: np.ndarray):
        self.X, self.y = X, y
        centered = X - X.mean(axis=0)
        self.scale = np.einsum("ij,ij->j", centered, centered)
        self.reset([])

    def reset(self, selected: list[int]) -> None:
        n = self.X.shape[0]
        design = np.column_stack([np.ones(n), self.X[:, selected]])
        q, r = np.linalg.qr(design)
        d = np.abs(np.diag(r))
        q = q[:, d > 1e-10 * max(d.max(), 1.0)]
        self.ry = self.y - q @ (q.T @ self.y)
        self.rx = self.X - q @ (q.T @ self.X)

    def add(self, j: int) -> None:
        v = self.rx[:, j]
        norm = np.sqrt(v @ v)
        if norm <= 1e-10 * np.sqrt(max(self.scale[j], 1e-300)):
            return
        q = v / norm
        self.ry = self.ry - q * (q @ self.ry)
        self.rx -= np.outer(q, q @ self.rx)


def _entry_p_values(res: _Residuals, n_selected: int, candidates: np.ndarray) -> np.ndarray:
    """p-value of each candidate's coefficient when added to the current model.

    Uses the partial-regression identity: the added coefficient and its
    t-statistic follow from the residuals of y and of the candidate after
    projecting out the intercept and the selected columns.
    """
    n = res.X.shape[0]
    ry = res.ry
    ss = np.einsum("ij,ij->j", res.rx, res.rx)[candidates]
    df = n - n_selected - 2
    rss = ry @ ry
    out = np.ones(len(candidates))
    if df <= 0 or rss <= 1e-12 * max(res.y @ res.y, 1.0):
        return out
    # columns (numerically) inside the current span are skipped this step
    usable = ss > 1e-10 * np.maximum(res.scale[candidates], 1e-300)
    xy = (ry @ res.rx)[candidates]
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = xy / ss
        rss_new = np.maximum(rss - xy * xy / ss, 0.0)
        se = np.sqrt(rss_new / df / ss)
        t = np.abs(beta) / se
    pv = np.where(rss_new > 0, 2.0 * stats.t.sf(t, df), 0.0)
    out[usable] = pv[usable]
    return out


def stepwise_linreg(
    m: FeatureMatrix,
    y,
    p_enter: float = 0.01,
    p_exit: float = 0.05,
    max_steps: int | None = None,
) -> LinearModel:
    """Bidirectional stepwise OLS.

    Each round adds the excluded column with the smallest entry p-value if it
    is below ``p_enter``, then drops the included column with the largest
    p-value if it exceeds ``p_exit``. Stops when neither step applies.
    Columns that are collinear with the current model are never entered.
    """
    X = np.asarray(m.values, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if max_steps is None:
        max_steps = 2 * p + 10
    selected: list[int] = []
    steps: list[tuple[str, str, float]] = []
    res = _Residuals(X, y)
    for _ in range(max_steps):
        changed = False
        candidates = np.array([j for j in range(p) if j not in selected], dtype=np.int64)
        if candidates.size:
            pv = _entry_p_values(res, len(selected), candidates)
            k = int(np.argmin(pv))
            if pv[k] < p_enter:
                j = int(candidates[k])
                selected.append(j)
                res.add(j)
                steps.append(("enter", m.column_names[j], float(pv[k])))
                changed = True
        if selected:
            _, pv = _ols(X[:, selected], y)
            k = int(np.argmax(pv))
            if pv[k] > p_exit:
                steps.append(("remove", m.column_names[selected[k]], float(pv[k])))
                selected.pop(k)
                res.reset(selected)
                changed = True
        if not changed:
            break

    beta, pv = _ols(X[:, selected], y)
    names = [m.column_names[j] for j in selected]
    return LinearModel(
        intercept=float(beta[0]),
        coefficients={nm: float(b) for nm, b in zip(names, beta[1:])},
        p_values={nm: float(v) for nm, v in zip(names, pv)},
        steps=steps,
    )


def cross_validate_linear(
    m: FeatureMatrix,
    targets: Mapping[str, np.ndarray],
    split: CvSplit,
    p_enter: float = 0.01,
    p_exit: float = 0.05,
) -> dict[str, CvResult]:
    """Sentence-level CV of the stepwise baseline (augmentation fitted per fold)."""
    folds = split.row_folds(m.sentence_ids)
    out = {}
    for dv, y in targets.items():
        y = np.asarray(y, dtype=float)
        fold_mae = []
        oof = np.empty(m.n_rows)
        for f in range(split.k):
            tr, va = folds != f, folds == f
            train = m.take_rows(tr)
            aug = fit_augmentation(train)
            model = stepwise_linreg(augment_log_features(train, aug), y[tr], p_enter, p_exit)
            pred = clip_predictions(model.predict(augment_log_features(m.take_rows(va), aug)))
            fold_mae.append(mae(pred, y[va]))
            oof[va] = pred
        out[dv] = CvResult(fold_mae=fold_mae, best_iterations=[], fold_pred=oof)
    return out
