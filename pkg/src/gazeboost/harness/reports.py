"""Score reports and aligned text tables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..corpus import DVS
from ..errors import UndefinedStatisticError
from .ablation import AblationReport
from .metrics import mae, official_score, pearson
from .search import TuneReport


@dataclass
class ScoreReport:
    per_dv_mae: dict[str, float]
    per_dv_r: dict[str, float] = field(default_factory=dict)

    @property
    def official(self) -> float:
        return official_score(self.per_dv_mae)

    @property
    def mean_r(self) -> float | None:
        if len(self.per_dv_r) != len(DVS):
            return None
        return sum(self.per_dv_r.values()) / len(DVS)

    @classmethod
    def from_predictions(cls, pred: Mapping[str, Any], gold: Mapping[str, Any]) -> ScoreReport:
        maes = {dv: mae(pred[dv], gold[dv]) for dv in DVS}
        rs = {}
        for dv in DVS:
            try:
                rs[dv] = pearson(pred[dv], gold[dv])
            except UndefinedStatisticError:
                pass
        return cls(maes, rs)

    def to_dict(self) -> dict:
        return {
            "per_dv_mae": self.per_dv_mae,
            "official_score": self.official,
            "per_dv_r": self.per_dv_r,
            "mean_r": self.mean_r,
        }


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]], digits: int = 4) -> str:
    """Right-aligned numeric columns, left-aligned text, fixed decimals."""

    def cell(v):
        if isinstance(v, float):
            return f"{v:.{digits}f}"
        return "" if v is None else str(v)

    text = [[cell(v) for v in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in text]) for i, h in enumerate(headers)]
    numeric = [
        bool(rows) and all(v is None or isinstance(v, (int, float)) for v in (r[i] for r in rows))
        for i in range(len(headers))
    ]

    def line(values):
        parts = [v.rjust(w) if num else v.ljust(w) for v, w, num in zip(values, widths, numeric)]
        return "  ".join(parts).rstrip()

    sep = "  ".join("-" * w for w in widths)
    return "\n".join([line(headers), sep] + [line(r) for r in text]) + "\n"


def score_table(report: ScoreReport, label: str = "system") -> str:
    return format_table(
        ["System", "Mean"] + list(DVS),
        [[label, report.official] + [report.per_dv_mae[dv] for dv in DVS]],
    )


def ablation_table(report: AblationReport) -> str:
    rows = []
    for r in report.rows:
        dev = report.dv_deviation(r)
        rows.append(
            [r.label, r.mean_mae, report.deviation(r), report.deviation_of_value(r)]
            + [dev.get(dv) for dv in DVS if dv in r.per_dv]
        )
    dvs = [dv for dv in DVS if dv in report.reference.per_dv]
    return format_table(["Model", "MAE", "%MAE", "%MAE(value)"] + [f"%{dv}" for dv in dvs], rows)


def tune_table(report: TuneReport, top: int | None = None) -> str:
    order = sorted(range(len(report.trials)), key=lambda i: report.trials[i].mean_mae)
    if top is not None:
        order = order[:top]
    names = list(report.trials[0].params) if report.trials else []
    rows = [[i, report.trials[i].mean_mae] + [report.trials[i].params[n] for n in names] for i in order]
    return format_table(["trial", "MAE"] + names, rows)


def write_json(data: dict, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=False)
        fh.write("\n")
