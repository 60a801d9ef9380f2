"""Feature-group ablation reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..corpus import DVS
from ..features import FeatureMatrix, drop_groups
from ..gbdt import TrainConfig
from .cv import CvSplit, cross_validate
from .metrics import official_score, percent_deviation, percent_deviation_of_value


def _mean_mae(per_dv: Mapping[str, float]) -> float:
    if set(per_dv) == set(DVS):
        return official_score(per_dv)
    return float(np.mean(list(per_dv.values())))


@dataclass
class AblationRow:
    label: str
    dropped: tuple[str, ...]
    per_dv: dict[str, float]

    @property
    def mean_mae(self) -> float:
        return _mean_mae(self.per_dv)


@dataclass
class AblationReport:
    """Rows compared against the first (reference) row.

    Deviations are reported two ways: relative to the reference MAE and
    relative to the row's own MAE. Negative means worse than the reference.
    """

    rows: list[AblationRow] = field(default_factory=list)

    @property
    def reference(self) -> AblationRow:
        return self.rows[0]

    def add(self, label: str, per_dv: Mapping[str, float], dropped: Sequence[str] = ()) -> AblationRow:
        row = AblationRow(label, tuple(dropped), dict(per_dv))
        self.rows.append(row)
        return row

    def deviation(self, row: AblationRow) -> float:
        return percent_deviation(self.reference.mean_mae, row.mean_mae)

    def deviation_of_value(self, row: AblationRow) -> float:
        return percent_deviation_of_value(self.reference.mean_mae, row.mean_mae)

    def dv_deviation(self, row: AblationRow) -> dict[str, float]:
        ref = self.reference.per_dv
        return {dv: percent_deviation(ref[dv], v) for dv, v in row.per_dv.items()}

    def to_dict(self) -> dict:
        return {
            "reference_mae": self.reference.mean_mae,
            "rows": [
                {
                    "label": r.label,
                    "dropped": list(r.dropped),
                    "mean_mae": r.mean_mae,
                    "per_dv_mae": r.per_dv,
                    "deviation_pct": self.deviation(r),
                    "deviation_pct_of_value": self.deviation_of_value(r),
                    "per_dv_deviation_pct": self.dv_deviation(r),
                }
                for r in self.rows
            ],
        }


def _label(groups: Sequence[str]) -> str:
    return "reference" if not groups else "w/o " + "+".join(groups)


def ablation(
    m: FeatureMatrix,
    targets: Mapping[str, np.ndarray],
    config: TrainConfig | Mapping[str, TrainConfig],
    split: CvSplit,
    group_sets: Iterable[Iterable[str]],
    n_jobs: int = 1,
) -> AblationReport:
    """Cross-validate once per drop set; the empty set is the reference.

    The reference run is prepended when ``group_sets`` lacks it.
    """
    sets = [tuple(sorted(set(g))) for g in group_sets]
    if () in sets:
        sets.remove(())
    sets.insert(0, ())
    report = AblationReport()
    for groups in sets:
        results = cross_validate(drop_groups(m, groups), targets, config, split, n_jobs=n_jobs)
        report.add(_label(groups), {dv: r.mean_mae for dv, r in results.items()}, groups)
    return report
