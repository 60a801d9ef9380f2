import numpy as np
import pytest

from gazeboost.corpus import DVS
from gazeboost.features import build_matrix
from gazeboost.gbdt import TrainConfig
from gazeboost.harness import AblationReport, ablation, ablation_table, kfold_by_sentence


def uniform(v):
    return dict.fromkeys(DVS, v)


def test_reference_row_has_zero_deviation():
    report = AblationReport()
    report.add("reference", uniform(3.8134))
    assert report.deviation(report.reference) == 0
    assert report.deviation_of_value(report.reference) == 0


def test_published_deviations():
    report = AblationReport()
    report.add("reference", uniform(3.8134))
    position = report.add("w/o position", uniform(4.095), ["position"])
    linear = report.add("linear", uniform(4.268))
    assert report.deviation(position) == pytest.approx(-7.39, abs=0.01)
    assert report.deviation(linear) == pytest.approx(-11.92, abs=0.01)
    assert report.deviation_of_value(linear) == pytest.approx(-10.65, abs=0.01)
    assert report.dv_deviation(position)["GPT"] == pytest.approx(-7.385, abs=1e-3)


def test_deviation_monotone_in_mae():
    report = AblationReport()
    report.add("reference", uniform(4.0))
    rows = [report.add(str(v), uniform(v)) for v in np.linspace(3.0, 6.0, 13)]
    devs = [report.deviation(r) for r in rows]
    assert np.all(np.diff(devs) < 0)
    assert all((d > 0) == (r.mean_mae < 4.0) for d, r in zip(devs, rows) if r.mean_mae != 4.0)


def test_ablation_run(small_corpus):
    m = build_matrix(small_corpus.sentences, small_corpus.lexicons, small_corpus.bigrams)
    split = kfold_by_sentence(small_corpus.sentences, 5, 0)
    targets = {dv: small_corpus.targets[dv] for dv in ("nFix", "GPT")}
    config = TrainConfig(n_iter=40, early_stopping_rounds=10, num_leaves=6)
    report = ablation(m, targets, config, split, [["position"], ["length", "position"]])
    assert [r.label for r in report.rows] == ["reference", "w/o position", "w/o length+position"]
    assert report.deviation(report.reference) == 0
    assert set(report.rows[1].per_dv) == {"nFix", "GPT"}
    data = report.to_dict()
    assert data["rows"][2]["dropped"] == ["length", "position"]
    text = ablation_table(report)
    assert "w/o length+position" in text and len(text.splitlines()) >= 4
