"""Command-line entry point.

Every subcommand reads a JSON run manifest (``--config``); relative paths
in it are resolved against the manifest's directory. Exit codes: 0 success,
1 internal error, 2 input or configuration error, 3 schema or contract
error between artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .corpus import (
    DVS,
    BigramTable,
    Lexicon,
    SentenceSet,
    attach_annotations,
    load_bigram_counts,
    load_lexicon,
    load_task_csv,
)
from .errors import ConfigurationError, ContractError, GazeboostError, InputError
from .features import GROUPS, FeatureGroupSpec, FeatureMatrix, build_matrix, save_matrix
from .gbdt import TrainConfig, fit, load_model, predict, save_model
from .harness import (
    ScoreReport,
    SearchSpace,
    ablation,
    ablation_table,
    clip_predictions,
    cross_validate,
    cross_validate_linear,
    cv_evaluator,
    format_table,
    kfold_by_sentence,
    official_score,
    pick_n_iter,
    random_search,
    score_table,
    tune_table,
)
from .harness.reports import write_json

log = logging.getLogger("gazeboost")


@dataclass
class LexiconSpec:
    path: Path
    name: str
    group: str
    columns: list[str] | None = None


@dataclass
class RunManifest:
    train: Path
    test: Path | None = None
    train_annotations: Path | None = None
    test_annotations: Path | None = None
    lexicons: list[LexiconSpec] = field(default_factory=list)
    bigrams: Path | None = None
    am_margins: str = "unigram"
    groups: frozenset[str] = frozenset(GROUPS)
    configs: dict[str, TrainConfig] = field(default_factory=dict)
    search_space: Path | None = None
    seed: int = 0
    folds: int = 5
    trials: int = 100
    ablation_sets: list[list[str]] = field(default_factory=list)
    n_iter_from_cv: bool = False
    output_dir: Path = Path("out")

    @classmethod
    def load(cls, path: str | Path) -> RunManifest:
        path = Path(path)
        if not path.is_file():
            raise InputError(f"manifest not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
        base = path.parent

        def p(value):
            if value is None:
                return None
            q = Path(value)
            return q if q.is_absolute() else base / q

        if "train" not in data:
            raise ConfigurationError(f"{path}: manifest lacks 'train'")
        lexicons = [
            LexiconSpec(p(lx["path"]), lx["name"], lx.get("group", "frequency"), lx.get("columns"))
            for lx in data.get("lexicons", [])
        ]
        if "configs" in data:
            configs = {dv: TrainConfig.from_dict(data["configs"][dv]) for dv in data["configs"]}
            missing = [dv for dv in DVS if dv not in configs]
            if missing:
                raise ConfigurationError(f"per-measure configs missing for {missing}")
        else:
            shared = TrainConfig.from_dict(data.get("config", {}))
            configs = {dv: shared for dv in DVS}
        groups = data.get("groups")
        default_ablation = [[g] for g in GROUPS]
        manifest = cls(
            train=p(data["train"]),
            test=p(data.get("test")),
            train_annotations=p(data.get("train_annotations")),
            test_annotations=p(data.get("test_annotations")),
            lexicons=lexicons,
            bigrams=p(data.get("bigrams")),
            am_margins=data.get("am_margins", "unigram"),
            groups=FeatureGroupSpec(frozenset(groups) if groups is not None else frozenset(GROUPS)).enabled,
            configs=configs,
            search_space=p(data.get("search_space")),
            seed=int(data.get("seed", 0)),
            folds=int(data.get("folds", 5)),
            trials=int(data.get("trials", 100)),
            ablation_sets=data.get("ablation_sets", default_ablation),
            n_iter_from_cv=bool(data.get("n_iter_from_cv", False)),
            output_dir=p(data.get("output_dir", "out")),
        )
        manifest.check_paths()
        return manifest

    def check_paths(self) -> None:
        paths = [self.train, self.test, self.train_annotations, self.test_annotations,
                 self.bigrams, self.search_space] + [lx.path for lx in self.lexicons]
        for q in paths:
            if q is not None and not q.is_file():
                raise InputError(f"input file not found: {q}")


class Pipeline:
    """Loads the manifest's inputs once and caches derived matrices."""

    def __init__(self, manifest: RunManifest, threads: int = 1):
        self.manifest = manifest
        self.threads = threads
        self._lexicons: list[Lexicon] | None = None
        self._bigrams: BigramTable | None = None

    def sentences(self, which: str) -> SentenceSet:
        m = self.manifest
        if which == "train":
            path, ann, targets = m.train, m.train_annotations, True
        else:
            if m.test is None:
                raise ConfigurationError("manifest has no 'test' set")
            path, ann, targets = m.test, m.test_annotations, False
        data = load_task_csv(path, expect_targets=targets)
        if ann is not None:
            data = attach_annotations(data, ann)
        return data

    @property
    def lexicons(self) -> list[Lexicon]:
        if self._lexicons is None:
            self._lexicons = [
                load_lexicon(lx.path, lx.name, lx.columns, lx.group) for lx in self.manifest.lexicons
            ]
        return self._lexicons

    @property
    def bigrams(self) -> BigramTable | None:
        if self._bigrams is None and self.manifest.bigrams is not None:
            self._bigrams = load_bigram_counts(self.manifest.bigrams)
        return self._bigrams

    def matrix(self, data: SentenceSet, category_dicts=None) -> FeatureMatrix:
        groups = set(self.manifest.groups)
        if self.bigrams is None:
            groups.discard("bigram_am")
        return build_matrix(data, self.lexicons, self.bigrams, groups, category_dicts,
                            am_margins=self.manifest.am_margins)

    def training_data(self) -> tuple[SentenceSet, FeatureMatrix, dict[str, np.ndarray]]:
        data = self.sentences("train")
        return data, self.matrix(data), data.targets()


def _selected_dvs(dv: str) -> list[str]:
    if dv == "all":
        return list(DVS)
    if dv not in DVS:
        raise ConfigurationError(f"unknown measure {dv!r}; choose from {DVS} or 'all'")
    return [dv]


def _out_dir(args, manifest: RunManifest) -> Path:
    out = Path(args.out) if args.out else manifest.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(text: str, path: Path) -> None:
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_features(args, pipe: Pipeline, out: Path) -> None:
    data = pipe.sentences("train")
    train = pipe.matrix(data)
    save_matrix(train, out / "features_train.csv", out / "features_train.json")
    log.info("train matrix: %d rows x %d columns", train.n_rows, train.n_cols)
    if pipe.manifest.test is not None:
        test = pipe.matrix(pipe.sentences("test"), train.category_dicts)
        save_matrix(test, out / "features_test.csv", out / "features_test.json")
    print(f"features: {train.n_rows} rows, {train.n_cols} columns -> {out}")


def cmd_cv(args, pipe: Pipeline, out: Path) -> None:
    data, m, targets = pipe.training_data()
    dvs = _selected_dvs(args.dv)
    split = kfold_by_sentence(data, pipe.manifest.folds, args.seed)
    results = cross_validate(m, {dv: targets[dv] for dv in dvs}, pipe.manifest.configs, split, pipe.threads)
    payload = {"folds": split.k, "seed": args.seed, "results": {}}
    rows = []
    for dv, r in results.items():
        entry = r.to_dict()
        entry["n_iter"] = pick_n_iter(r.best_iterations) if split.k >= 4 else None
        payload["results"][dv] = entry
        rows.append([dv, r.mean_mae] + list(r.fold_mae) + [entry["n_iter"]])
    if len(results) == len(DVS):
        payload["official_score"] = official_score({dv: r.mean_mae for dv, r in results.items()})
    write_json(payload, out / "cv.json")
    headers = ["DV", "MAE"] + [f"fold{f}" for f in range(split.k)] + ["n_iter"]
    text = format_table(headers, rows)
    if "official_score" in payload:
        text += f"\nofficial score: {payload['official_score']:.4f}\n"
    _emit(text, out / "cv.txt")


def _search_space(manifest: RunManifest) -> SearchSpace:
    if manifest.search_space is not None:
        return SearchSpace.from_json(manifest.search_space)
    return SearchSpace.submission()


def cmd_tune(args, pipe: Pipeline, out: Path) -> None:
    data, m, targets = pipe.training_data()
    split = kfold_by_sentence(data, pipe.manifest.folds, args.seed)
    space = _search_space(pipe.manifest)
    trials = args.trials or pipe.manifest.trials
    for dv in _selected_dvs(args.dv):
        evaluator = cv_evaluator(m, {dv: targets[dv]}, pipe.manifest.configs[dv], split)
        report = random_search(space, trials, args.seed, evaluator, n_jobs=pipe.threads)
        write_json(report.to_dict(), out / f"tune_{dv}.json")
        _emit(f"# {dv}\n" + tune_table(report), out / f"tune_{dv}.txt")


def cmd_ablate(args, pipe: Pipeline, out: Path) -> None:
    data, m, targets = pipe.training_data()
    dvs = _selected_dvs(args.dv)
    split = kfold_by_sentence(data, pipe.manifest.folds, args.seed)
    present = m.groups
    sets = [s for s in pipe.manifest.ablation_sets if set(s) <= present]
    report = ablation(m, {dv: targets[dv] for dv in dvs}, pipe.manifest.configs, split, sets, pipe.threads)
    write_json(report.to_dict(), out / "ablation.json")
    _emit(ablation_table(report), out / "ablation.txt")


def cmd_baseline(args, pipe: Pipeline, out: Path) -> None:
    data, m, targets = pipe.training_data()
    dvs = _selected_dvs(args.dv)
    split = kfold_by_sentence(data, pipe.manifest.folds, args.seed)
    results = cross_validate_linear(m, {dv: targets[dv] for dv in dvs}, split)
    payload = {"results": {dv: r.to_dict() for dv, r in results.items()}}
    if len(results) == len(DVS):
        payload["official_score"] = official_score({dv: r.mean_mae for dv, r in results.items()})
    write_json(payload, out / "baseline.json")
    rows = [[dv, r.mean_mae] + list(r.fold_mae) for dv, r in results.items()]
    _emit(format_table(["DV", "MAE"] + [f"fold{f}" for f in range(split.k)], rows), out / "baseline.txt")


def cmd_train(args, pipe: Pipeline, out: Path) -> None:
    data, m, targets = pipe.training_data()
    split = kfold_by_sentence(data, pipe.manifest.folds, args.seed)
    rows = []
    for dv in _selected_dvs(args.dv):
        config = pipe.manifest.configs[dv]
        if pipe.manifest.n_iter_from_cv:
            cv = cross_validate(m, {dv: targets[dv]}, config, split, pipe.threads)[dv]
            config = config.replace(n_iter=pick_n_iter(cv.best_iterations))
        config = config.replace(early_stopping_rounds=0)
        ensemble, report = fit(m, targets[dv], config)
        save_model(ensemble, out / f"model_{dv}.json")
        rows.append([dv, ensemble.n_trees, report.train_loss[-1] if report.train_loss else None])
    _emit(format_table(["DV", "trees", "train_loss"], rows), out / "train.txt")


def cmd_predict(args, pipe: Pipeline, out: Path) -> None:
    data = pipe.sentences("test")
    dvs = _selected_dvs(args.dv)
    models = {}
    for dv in dvs:
        path = out / f"model_{dv}.json"
        if not path.is_file():
            raise InputError(f"model not found: {path}")
        models[dv] = load_model(path)
    preds = {}
    for dv, model in models.items():
        m = pipe.matrix(data, model.category_dicts or None)
        if m.column_names != model.column_names:
            raise ContractError(f"{dv}: feature columns do not match the model manifest")
        preds[dv] = clip_predictions(predict(model, m))
    path = out / "predictions.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sentence_id", "word_id", "word"] + dvs)
        for i, tok in enumerate(data.tokens()):
            values = [repr(float(preds[dv][i])) for dv in dvs]
            writer.writerow([tok.sentence_id, tok.word_id, tok.surface] + values)
    print(f"predictions for {data.n_tokens} tokens -> {path}")


def read_prediction_csv(path: Path) -> tuple[list[tuple[int, int]], dict[str, np.ndarray]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("sentence_id", "word_id", *DVS) if c not in (reader.fieldnames or [])]
        if missing:
            raise ContractError(f"{path}: missing columns {missing}")
        keys, cols = [], {dv: [] for dv in DVS}
        for row in reader:
            try:
                keys.append((int(row["sentence_id"]), int(row["word_id"])))
                for dv in DVS:
                    cols[dv].append(float(row[dv]))
            except ValueError as exc:
                raise InputError(f"{path} line {reader.line_num}: {exc}") from None
    return keys, {dv: np.array(v) for dv, v in cols.items()}


def cmd_score(args, out: Path | None) -> None:
    if args.mae:
        report = ScoreReport(dict(zip(DVS, args.mae)))
    else:
        if not (args.pred and args.gold):
            raise ConfigurationError("score needs --pred and --gold, or --mae with five values")
        for q in (args.pred, args.gold):
            if not Path(q).is_file():
                raise InputError(f"input file not found: {q}")
        pkeys, pred = read_prediction_csv(Path(args.pred))
        gkeys, gold = read_prediction_csv(Path(args.gold))
        if pkeys != gkeys:
            raise ContractError("prediction and gold tokens do not align")
        report = ScoreReport.from_predictions(pred, gold)
    text = score_table(report, label=args.label)
    if out is not None:
        write_json(report.to_dict(), out / "score.json")
        (out / "score.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)


COMMANDS = {
    "features": cmd_features,
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "tune": cmd_tune,
    "ablate": cmd_ablate,
    "baseline": cmd_baseline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazeboost", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["score"]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "score", help="run manifest (JSON)")
        p.add_argument("--dv", default="all", help="measure name or 'all'")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None, help="output directory")
        if name == "tune":
            p.add_argument("--trials", type=int, default=None)
        if name == "score":
            p.add_argument("--pred", help="predictions CSV")
            p.add_argument("--gold", help="gold CSV with the five measures")
            p.add_argument("--mae", type=float, nargs=5, metavar="MAE", help="five per-measure MAEs")
            p.add_argument("--label", default="system")
    return parser


def _setup_log(out: Path) -> None:
    handler = logging.FileHandler(out / "gazeboost.log", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO)
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "score":
            out = None
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
            cmd_score(args, out)
            return 0
        manifest = RunManifest.load(args.config)
        if args.seed is None:
            args.seed = manifest.seed
        out = _out_dir(args, manifest)
        _setup_log(out)
        log.info("gazeboost %s %s", __version__, " ".join(argv if argv is not None else sys.argv[1:]))
        COMMANDS[args.command](args, Pipeline(manifest, threads=max(1, args.threads)), out)
        return 0
    except GazeboostError as exc:
        print(f"gazeboost {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gazeboost {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"gazeboost {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
