"""Word-level feature matrix for eye-tracking measure prediction.

Every column belongs to one of eight groups so whole families can be
ablated at once. Missing cells are NaN; categorical cells hold integer ids
from a per-column dictionary in which id 0 is reserved for categories not
seen when the dictionary was built.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .association import AM_NAMES, MARGINS, am_scores, contingency, missing_scores
from .corpus import BigramTable, Lexicon, SentenceSet, Token, lookup
from .errors import ConfigurationError, ParseError, SchemaError

GROUPS = (
    "length",
    "position",
    "postag_lemma",
    "frequency",
    "norms",
    "elp_characteristics",
    "elp_behavioral",
    "bigram_am",
)
NUMERIC = "numeric"
CATEGORICAL = "categorical"
UNKNOWN_CATEGORY = "<unk>"
UNKNOWN_ID = 0

MANIFEST_FORMAT = "gazeboost-features"
MANIFEST_VERSION = 1


def check_groups(groups: Iterable[str]) -> frozenset[str]:
    groups = frozenset(groups)
    unknown = sorted(groups - set(GROUPS))
    if unknown:
        raise ConfigurationError(f"unknown feature groups: {unknown}")
    return groups


@dataclass(frozen=True)
class FeatureGroupSpec:
    enabled: frozenset[str] = frozenset(GROUPS)

    def __post_init__(self):
        object.__setattr__(self, "enabled", check_groups(self.enabled))

    @classmethod
    def only(cls, *groups: str) -> FeatureGroupSpec:
        return cls(frozenset(groups))

    def without(self, *groups: str) -> FeatureGroupSpec:
        return FeatureGroupSpec(self.enabled - check_groups(groups))


@dataclass
class FeatureMatrix:
    column_names: list[str]
    column_kinds: list[str]
    group_of: dict[str, str]
    values: np.ndarray
    category_dicts: dict[str, dict[str, int]] = field(default_factory=dict)
    row_keys: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise SchemaError("feature values must be a 2-d array")
        n_rows, n_cols = self.values.shape
        if n_cols != len(self.column_names) or n_cols != len(self.column_kinds):
            raise SchemaError("column metadata does not match the value array")
        if self.row_keys and len(self.row_keys) != n_rows:
            raise SchemaError("row_keys do not match the value array")
        for name in self.column_names:
            if self.group_of.get(name) not in GROUPS:
                raise SchemaError(f"column {name!r} has no valid group")

    @classmethod
    def from_array(
        cls,
        values,
        column_names: Sequence[str] | None = None,
        group: str = "frequency",
        sentence_ids: Sequence[int] | None = None,
    ) -> FeatureMatrix:
        """Numeric matrix from a 2-d array, every column in one group.

        Without ``sentence_ids`` each row is its own one-token sentence.
        """
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise SchemaError("feature values must be a 2-d array")
        n, p = values.shape
        names = list(column_names) if column_names is not None else [f"x{j}" for j in range(p)]
        if sentence_ids is None:
            keys = [(i, 1) for i in range(n)]
        else:
            keys, rank, last = [], 0, None
            for sid in sentence_ids:
                rank = rank + 1 if sid == last else 1
                last = sid
                keys.append((int(sid), rank))
        return cls(names, [NUMERIC] * p, dict.fromkeys(names, group), values, row_keys=keys)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def groups(self) -> frozenset[str]:
        return frozenset(self.group_of[c] for c in self.column_names)

    @property
    def is_categorical(self) -> np.ndarray:
        return np.array([k == CATEGORICAL for k in self.column_kinds], dtype=bool)

    @property
    def sentence_ids(self) -> np.ndarray:
        return np.array([k[0] for k in self.row_keys], dtype=np.int64)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_names.index(name)]

    def take_rows(self, rows) -> FeatureMatrix:
        rows = np.asarray(rows)
        if rows.dtype == bool:
            rows = np.flatnonzero(rows)
        return FeatureMatrix(
            column_names=list(self.column_names),
            column_kinds=list(self.column_kinds),
            group_of=dict(self.group_of),
            values=self.values[rows],
            category_dicts={k: dict(v) for k, v in self.category_dicts.items()},
            row_keys=[self.row_keys[i] for i in rows] if self.row_keys else [],
        )

    def take_columns(self, names: Sequence[str]) -> FeatureMatrix:
        idx = [self.column_names.index(n) for n in names]
        return FeatureMatrix(
            column_names=list(names),
            column_kinds=[self.column_kinds[i] for i in idx],
            group_of={n: self.group_of[n] for n in names},
            values=self.values[:, idx].reshape(self.n_rows, len(idx)),
            category_dicts={
                n: dict(d) for n, d in self.category_dicts.items() if n in names
            },
            row_keys=list(self.row_keys),
        )

    def manifest(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "columns": [
                {"name": n, "kind": k, "group": self.group_of[n]}
                for n, k in zip(self.column_names, self.column_kinds)
            ],
            "category_dicts": {
                n: self.category_dicts[n]
                for n in self.column_names
                if n in self.category_dicts
            },
        }

    def equals(self, other: FeatureMatrix) -> bool:
        return (
            self.column_names == other.column_names
            and self.column_kinds == other.column_kinds
            and self.group_of == other.group_of
            and self.category_dicts == other.category_dicts
            and list(self.row_keys) == list(other.row_keys)
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


def length_features(sentence: Sequence[Token], i: int) -> tuple[int | None, int, int | None]:
    """Character lengths of the previous, current and next normalized forms."""
    prev_len = len(sentence[i - 1].normalized) if i > 0 else None
    next_len = len(sentence[i + 1].normalized) if i + 1 < len(sentence) else None
    return prev_len, len(sentence[i].normalized), next_len


def position_features(sentence_len: int, rank: int) -> tuple[int, float]:
    if not 1 <= rank <= sentence_len:
        raise ValueError(f"rank {rank} outside 1..{sentence_len}")
    return rank, rank / sentence_len


def _encode(value: str | None, table: dict[str, int], frozen: bool) -> float:
    if value is None:
        return math.nan
    if value not in table:
        if frozen:
            return float(UNKNOWN_ID)
        table[value] = len(table)
    return float(table[value])


def build_matrix(
    sentence_set: SentenceSet,
    lexicons: Sequence[Lexicon] = (),
    bigrams: BigramTable | None = None,
    spec: FeatureGroupSpec | Iterable[str] | None = None,
    category_dicts: Mapping[str, Mapping[str, int]] | None = None,
    am_margins: str = "unigram",
) -> FeatureMatrix:
    """Assemble the feature matrix, one row per token in corpus order.

    Parameters
    ----------
    sentence_set : SentenceSet
        Tokens, optionally annotated with lemma and POS.
    lexicons : sequence of Lexicon
        Each lexicon contributes one column per value column, placed in the
        group named by ``Lexicon.group``.
    bigrams : BigramTable, optional
        Reference counts for the association measures on (previous word,
        target word). Required when the ``bigram_am`` group is enabled.
    spec : FeatureGroupSpec or iterable of group names, optional
        Enabled groups; all eight by default.
    category_dicts : mapping, optional
        Dictionaries from a training matrix. When given, categories are
        encoded with them and unseen values map to the reserved unknown id;
        otherwise new dictionaries are built in first-seen order.
    am_margins : {"unigram", "bigram"}
        Margins of the contingency tables; see
        :func:`gazeboost.association.contingency`.
    """
    if am_margins not in MARGINS:
        raise ConfigurationError(f"am_margins must be one of {MARGINS}")
    if spec is None:
        spec = FeatureGroupSpec()
    elif not isinstance(spec, FeatureGroupSpec):
        spec = FeatureGroupSpec(frozenset(spec))
    enabled = spec.enabled
    if "bigram_am" in enabled and bigrams is None:
        raise ConfigurationError("bigram_am group enabled but no bigram table given")

    names: list[str] = []
    kinds: list[str] = []
    group_of: dict[str, str] = {}

    def add(name, kind, group):
        if name in group_of:
            raise ConfigurationError(f"duplicate feature column {name!r}")
        names.append(name)
        kinds.append(kind)
        group_of[name] = group

    if "length" in enabled:
        for n in ("len_prev", "len", "len_next"):
            add(n, NUMERIC, "length")
    if "position" in enabled:
        add("rank", NUMERIC, "position")
        add("rank_ratio", NUMERIC, "position")
    cat_cols = ("pos", "pos_prev", "lemma", "lemma_prev")
    if "postag_lemma" in enabled:
        for n in cat_cols:
            add(n, CATEGORICAL, "postag_lemma")
    used_lexicons = [lx for lx in lexicons if lx.group in enabled]
    for lx in used_lexicons:
        for col in lx.columns:
            add(f"{lx.name}:{col}", NUMERIC, lx.group)
    if "bigram_am" in enabled:
        for n in AM_NAMES:
            add(f"am_{n}", NUMERIC, "bigram_am")

    frozen = category_dicts is not None
    dicts: dict[str, dict[str, int]] = {}
    if "postag_lemma" in enabled:
        for n in cat_cols:
            if frozen:
                if n not in category_dicts:
                    raise SchemaError(f"no category dictionary for column {n!r}")
                dicts[n] = dict(category_dicts[n])
            else:
                dicts[n] = {UNKNOWN_CATEGORY: UNKNOWN_ID}

    rows: list[list[float]] = []
    keys: list[tuple[int, int]] = []
    for sent in sentence_set.sentences:
        for i, tok in enumerate(sent):
            row: list[float] = []
            if "length" in enabled:
                row.extend(math.nan if v is None else float(v) for v in length_features(sent, i))
            if "position" in enabled:
                row.extend(position_features(len(sent), tok.rank))
            if "postag_lemma" in enabled:
                prev = sent[i - 1] if i > 0 else None
                row.append(_encode(tok.pos, dicts["pos"], frozen))
                row.append(_encode(prev.pos if prev else None, dicts["pos_prev"], frozen))
                row.append(_encode(tok.lemma, dicts["lemma"], frozen))
                row.append(
                    _encode(prev.lemma if prev else None, dicts["lemma_prev"], frozen)
                )
            for lx in used_lexicons:
                row.extend(lookup(lx, tok))
            if "bigram_am" in enabled:
                scores = missing_scores()
                if i > 0 and sent[i - 1].normalized and tok.normalized:
                    table = contingency(bigrams, sent[i - 1].normalized, tok.normalized, am_margins)
                    if table is not None:
                        scores = am_scores(table)
                row.extend(scores[n] for n in AM_NAMES)
            rows.append(row)
            keys.append((tok.sentence_id, tok.rank))

    values = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return FeatureMatrix(
        column_names=names,
        column_kinds=kinds,
        group_of=group_of,
        values=values,
        category_dicts=dicts,
        row_keys=keys,
    )


def drop_groups(m: FeatureMatrix, groups: Iterable[str]) -> FeatureMatrix:
    """Remove every column belonging to the named groups."""
    groups = check_groups(groups)
    absent = sorted(groups - m.groups)
    if absent:
        raise ConfigurationError(f"groups not present in matrix: {absent}")
    keep = [n for n in m.column_names if m.group_of[n] not in groups]
    return m.take_columns(keep)


def coverage(m: FeatureMatrix) -> dict[str, float]:
    """Fraction of rows with a missing value, per column."""
    miss = np.isnan(m.values).mean(axis=0) if m.n_rows else np.zeros(m.n_cols)
    return dict(zip(m.column_names, miss.tolist()))


def save_matrix(m: FeatureMatrix, csv_path: str | Path, manifest_path: str | Path) -> None:
    """Write the matrix as CSV (empty field = missing) plus a JSON manifest."""
    with Path(csv_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sentence_id", "rank"] + m.column_names)
        cat = m.is_categorical
        for key, row in zip(m.row_keys, m.values):
            cells = []
            for v, is_cat in zip(row, cat):
                if math.isnan(v):
                    cells.append("")
                elif is_cat:
                    cells.append(str(int(v)))
                else:
                    cells.append(repr(float(v)))
            writer.writerow([key[0], key[1]] + cells)
    with Path(manifest_path).open("w", encoding="utf-8") as fh:
        json.dump(m.manifest(), fh, indent=2)
        fh.write("\n")


def load_matrix(csv_path: str | Path, manifest_path: str | Path) -> FeatureMatrix:
    with Path(manifest_path).open(encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != MANIFEST_FORMAT:
        raise SchemaError(f"{manifest_path}: not a feature manifest")
    cols = manifest["columns"]
    names = [c["name"] for c in cols]
    keys, rows = [], []
    with Path(csv_path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["sentence_id", "rank"] + names:
            raise SchemaError(f"{csv_path}: header does not match manifest")
        for row in reader:
            try:
                keys.append((int(row[0]), int(row[1])))
                rows.append([float(c) if c else math.nan for c in row[2:]])
            except ValueError as exc:
                raise ParseError(f"{csv_path} line {reader.line_num}: {exc}") from None
    return FeatureMatrix(
        column_names=names,
        column_kinds=[c["kind"] for c in cols],
        group_of={c["name"]: c["group"] for c in cols},
        values=np.array(rows, dtype=float).reshape(len(rows), len(names)),
        category_dicts={k: dict(v) for k, v in manifest.get("category_dicts", {}).items()},
        row_keys=keys,
    )
