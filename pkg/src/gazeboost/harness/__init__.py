"""Experiment protocol: cross-validation, search, ablation, baselines, scoring."""

from .ablation import AblationReport, AblationRow, ablation
from .cv import CvResult, CvSplit, cross_validate, kfold_by_sentence, pick_n_iter
from .linear import (
    Augmentation,
    LinearModel,
    augment_log_features,
    cross_validate_linear,
    fit_augmentation,
    stepwise_linreg,
)
from .metrics import (
    clip_predictions,
    mae,
    official_score,
    pearson,
    percent_deviation,
    percent_deviation_of_value,
    rmse,
)
from .reports import ScoreReport, ablation_table, format_table, score_table, tune_table
from .search import SearchSpace, Trial, TuneReport, cv_evaluator, random_search, submission_grid

__all__ = [
    "AblationReport",
    "AblationRow",
    "Augmentation",
    "CvResult",
    "CvSplit",
    "LinearModel",
    "ScoreReport",
    "SearchSpace",
    "Trial",
    "TuneReport",
    "ablation",
    "ablation_table",
    "submission_grid",
    "augment_log_features",
    "clip_predictions",
    "cross_validate",
    "cross_validate_linear",
    "cv_evaluator",
    "fit_augmentation",
    "format_table",
    "kfold_by_sentence",
    "mae",
    "official_score",
    "pearson",
    "percent_deviation",
    "percent_deviation_of_value",
    "pick_n_iter",
    "random_search",
    "rmse",
    "score_table",
    "stepwise_linreg",
    "tune_table",
]
