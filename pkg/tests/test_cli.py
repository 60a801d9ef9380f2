import csv
import dataclasses
import json
import subprocess
import sys

import pytest

from gazeboost import __version__
from gazeboost.cli import main
from gazeboost.corpus import DVS
from gazeboost.synthetic import make_corpus, split_sentences, write_fixture


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    corpus = make_corpus(n_sentences=30, seed=5)
    train, test = split_sentences(corpus.sentences, 6)
    d = tmp_path_factory.mktemp("run")
    write_fixture(dataclasses.replace(corpus, sentences=train), d, test=test)
    return d


def run(fixture_dir, *args, out="out"):
    return main([*args, "--config", str(fixture_dir / "manifest.json"), "--out", str(fixture_dir / out)])


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and __version__ in capsys.readouterr().out


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "gazeboost", "--version"], capture_output=True, text=True)
    assert done.returncode == 0 and __version__ in done.stdout


def test_features(fixture_dir, capsys):
    assert run(fixture_dir, "features") == 0
    meta = json.loads((fixture_dir / "out" / "features_train.json").read_text())
    # 3 length, 2 position, 4 POS/lemma, 1+1 frequency, 2 norms, 8 AM
    assert len(meta["columns"]) == 21
    assert (fixture_dir / "out" / "features_test.csv").is_file()
    assert "21 columns" in capsys.readouterr().out


def test_rerun_is_byte_identical(fixture_dir):
    assert run(fixture_dir, "cv", "--dv", "nFix", out="a") == 0
    assert run(fixture_dir, "cv", "--dv", "nFix", out="b") == 0
    for name in ("cv.json", "cv.txt"):
        assert (fixture_dir / "a" / name).read_bytes() == (fixture_dir / "b" / name).read_bytes()
    cv = json.loads((fixture_dir / "a" / "cv.json").read_text())
    assert len(cv["results"]["nFix"]["best_iterations"]) == 5
    assert (fixture_dir / "a" / "gazeboost.log").is_file()


def test_missing_lexicon_exit_code(fixture_dir, tmp_path, capsys):
    manifest = json.loads((fixture_dir / "manifest.json").read_text())
    manifest["lexicons"][0]["path"] = str(tmp_path / "absent.tsv")
    for key in ("train", "train_annotations", "test", "test_annotations", "bigrams"):
        manifest[key] = str(fixture_dir / manifest[key])
    for lx in manifest["lexicons"][1:]:
        lx["path"] = str(fixture_dir / lx["path"])
    (tmp_path / "m.json").write_text(json.dumps(manifest))
    code = main(["features", "--config", str(tmp_path / "m.json"), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "absent.tsv" in capsys.readouterr().err


def test_bad_manifest_exit_code(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"train": "x.csv", "config": {"num_leaves": 1}}))
    assert main(["cv", "--config", str(tmp_path / "m.json"), "--out", str(tmp_path / "o")]) == 2


def test_tune_writes_every_trial(fixture_dir, tmp_path):
    space = {"num_leaves": [4, 6, 8], "learning_rate": [0.1, 0.2], "min_data_in_leaf": [5, 10]}
    (tmp_path / "space.json").write_text(json.dumps(space))
    manifest = json.loads((fixture_dir / "manifest.json").read_text())
    manifest["search_space"] = str(tmp_path / "space.json")
    (fixture_dir / "tune_manifest.json").write_text(json.dumps(manifest))
    code = main(["tune", "--config", str(fixture_dir / "tune_manifest.json"), "--dv", "FFD",
                 "--trials", "5", "--out", str(fixture_dir / "tune")])
    assert code == 0
    report = json.loads((fixture_dir / "tune" / "tune_FFD.json").read_text())
    assert len(report["trials"]) == 5
    assert all(t["params"]["num_leaves"] in (4, 6, 8) for t in report["trials"])


def test_train_predict_score(fixture_dir, tmp_path, capsys):
    assert run(fixture_dir, "train", out="model") == 0
    assert run(fixture_dir, "predict", out="model") == 0
    pred = fixture_dir / "model" / "predictions.csv"
    with pred.open() as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["sentence_id", "word_id", "word", *DVS]
    assert all(0 <= float(r[dv]) <= 100 for r in rows for dv in DVS)
    code = main(["score", "--pred", str(pred), "--gold", str(pred), "--out", str(tmp_path)])
    assert code == 0
    assert json.loads((tmp_path / "score.json").read_text())["official_score"] == 0


def test_predict_schema_mismatch(fixture_dir, tmp_path):
    assert run(fixture_dir, "train", "--dv", "GPT", out="mismatch") == 0
    manifest = json.loads((fixture_dir / "manifest.json").read_text())
    manifest["groups"] = ["length", "position"]
    (fixture_dir / "narrow.json").write_text(json.dumps(manifest))
    code = main(["predict", "--config", str(fixture_dir / "narrow.json"), "--dv", "GPT",
                 "--out", str(fixture_dir / "mismatch")])
    assert code == 3


def test_score_from_maes(capsys):
    assert main(["score", "--mae", "3.879", "0.655", "2.197", "1.524", "10.812", "--label", "rank-1"]) == 0
    out = capsys.readouterr().out
    assert "3.8134" in out and "rank-1" in out


def test_score_needs_inputs(capsys):
    assert main(["score"]) == 2
    assert "--mae" in capsys.readouterr().err
