"""Task data, token annotations and external lexical resources.

The readers here are deliberately strict: a malformed line raises with its
line number instead of being skipped, because silently dropping a token
shifts every positional feature of the sentence it belongs to.
"""

from __future__ import annotations

import csv
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    ConsistencyError,
    ParseError,
    SchemaError,
    StructureError,
    ValidationError,
)

DVS = ("nFix", "FFD", "GPT", "TRT", "fixProp")
TARGET_RANGE = (0.0, 100.0)

LEXICON_GROUPS = ("frequency", "norms", "elp_characteristics", "elp_behavioral")


def _is_punct_or_symbol(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def normalize_token(surface: str) -> str:
    """Strip leading and trailing punctuation and symbol characters.

    Interior characters are kept ("don't" stays intact) and case is
    preserved. A token made only of punctuation becomes the empty string.

    >>> normalize_token("(Reuters)")
    'Reuters'
    >>> normalize_token("$5,")
    '5'
    """
    start, stop = 0, len(surface)
    while start < stop and _is_punct_or_symbol(surface[start]):
        start += 1
    while stop > start and _is_punct_or_symbol(surface[stop - 1]):
        stop -= 1
    return surface[start:stop]


def lookup_key(text: str) -> str:
    return text.casefold()


@dataclass(frozen=True)
class Token:
    sentence_id: int
    word_id: int
    rank: int
    surface: str
    normalized: str
    lemma: str | None = None
    pos: str | None = None
    targets: tuple[float, ...] | None = None

    def target(self, dv: str) -> float:
        if self.targets is None:
            raise KeyError(f"token {self.sentence_id}:{self.word_id} has no targets")
        return self.targets[DVS.index(dv)]


@dataclass(frozen=True)
class SentenceSet:
    sentences: tuple[tuple[Token, ...], ...]

    def __post_init__(self):
        ids = [s[0].sentence_id for s in self.sentences if s]
        if any(not s for s in self.sentences):
            raise StructureError("empty sentence")
        if len(set(ids)) != len(ids):
            raise StructureError("sentence ids are not unique")
        for sent in self.sentences:
            for expected, tok in enumerate(sent, start=1):
                if tok.rank != expected or tok.sentence_id != sent[0].sentence_id:
                    raise StructureError(
                        f"sentence {sent[0].sentence_id}: ranks must run 1..n"
                    )

    @property
    def has_targets(self) -> bool:
        return bool(self.sentences) and all(
            t.targets is not None for s in self.sentences for t in s
        )

    @property
    def sentence_ids(self) -> list[int]:
        return [s[0].sentence_id for s in self.sentences]

    def tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s]

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def targets(self) -> dict[str, np.ndarray]:
        """Per-DV target vectors in token order."""
        if not self.has_targets:
            raise ValidationError("sentence set carries no targets")
        arr = np.array([t.targets for t in self.tokens()], dtype=float)
        return {dv: arr[:, j].copy() for j, dv in enumerate(DVS)}

    def subset(self, sentence_ids: Iterable[int]) -> SentenceSet:
        keep = set(sentence_ids)
        return SentenceSet(tuple(s for s in self.sentences if s[0].sentence_id in keep))


def _parse_int(value: str, what: str, lineno: int) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"line {lineno}: {what} is not an integer: {value!r}") from None


def _parse_float(value: str, what: str, lineno: int) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"line {lineno}: {what} is not a number: {value!r}") from None
    if not math.isfinite(out):
        raise ParseError(f"line {lineno}: {what} is not finite: {value!r}")
    return out


def load_task_csv(path: str | Path, expect_targets: bool = True) -> SentenceSet:
    """Read a shared-task style CSV into a :class:`SentenceSet`.

    Tokens of one sentence must be contiguous and their ``word_id`` values
    consecutive. Both zero-based and one-based word ids are accepted; the
    rank is always one-based.
    """
    path = Path(path)
    required = ["sentence_id", "word_id", "word"] + (list(DVS) if expect_targets else [])
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"{path}: header lacks columns {missing}")
        pos = {name: header.index(name) for name in required}

        groups: list[list[tuple[int, int, str, tuple[float, ...] | None]]] = []
        seen: set[int] = set()
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            sid = _parse_int(row[pos["sentence_id"]], "sentence_id", lineno)
            wid = _parse_int(row[pos["word_id"]], "word_id", lineno)
            word = row[pos["word"]]
            targets = None
            if expect_targets:
                targets = tuple(_parse_float(row[pos[dv]], dv, lineno) for dv in DVS)
                for dv, v in zip(DVS, targets):
                    if not TARGET_RANGE[0] <= v <= TARGET_RANGE[1]:
                        raise ValidationError(
                            f"line {lineno}: {dv}={v} outside [0, 100]"
                        )
            if not groups or groups[-1][0][0] != sid:
                if sid in seen:
                    raise StructureError(
                        f"line {lineno}: sentence {sid} is not contiguous"
                    )
                seen.add(sid)
                if wid not in (0, 1):
                    raise StructureError(
                        f"line {lineno}: sentence {sid} starts at word_id {wid}"
                    )
                groups.append([])
            elif wid != groups[-1][-1][1] + 1:
                raise StructureError(
                    f"line {lineno}: word_id {wid} does not follow "
                    f"{groups[-1][-1][1]} in sentence {sid}"
                )
            groups[-1].append((sid, wid, word, targets))

    sentences = []
    for group in groups:
        offset = 1 - group[0][1]
        sentences.append(
            tuple(
                Token(sid, wid, wid + offset, word, normalize_token(word), targets=tg)
                for sid, wid, word, tg in group
            )
        )
    return SentenceSet(tuple(sentences))


def write_task_csv(sentence_set: SentenceSet, path: str | Path) -> None:
    header = ["sentence_id", "word_id", "word"]
    with_targets = sentence_set.has_targets
    if with_targets:
        header += list(DVS)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for tok in sentence_set.tokens():
            row = [tok.sentence_id, tok.word_id, tok.surface]
            if with_targets:
                row += [repr(v) for v in tok.targets]
            writer.writerow(row)


def attach_annotations(sentence_set: SentenceSet, path: str | Path) -> SentenceSet:
    """Join lemma/POS rows onto tokens by ``(sentence_id, word_id)``.

    An optional header line starting with ``sentence_id`` is skipped.
    """
    index = {
        (t.sentence_id, t.word_id): (i, j)
        for i, s in enumerate(sentence_set.sentences)
        for j, t in enumerate(s)
    }
    updates: dict[tuple[int, int], tuple[str, str]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if lineno == 1 and fields[0] == "sentence_id":
                continue
            if len(fields) != 4:
                raise ParseError(f"line {lineno}: expected 4 tab-separated fields")
            key = (
                _parse_int(fields[0], "sentence_id", lineno),
                _parse_int(fields[1], "word_id", lineno),
            )
            if key not in index:
                raise AlignmentError(
                    f"line {lineno}: no token with sentence_id={key[0]}, word_id={key[1]}"
                )
            updates[key] = (fields[2], fields[3])
    if not updates:
        return sentence_set
    sentences = []
    for sent in sentence_set.sentences:
        new = []
        for tok in sent:
            ann = updates.get((tok.sentence_id, tok.word_id))
            new.append(tok if ann is None else replace(tok, lemma=ann[0], pos=ann[1]))
        sentences.append(tuple(new))
    return SentenceSet(tuple(sentences))


@dataclass(frozen=True)
class Lexicon:
    """A keyed table of optional numeric values (NaN marks a missing value).

    Keys are stored case-folded.
    """

    name: str
    columns: tuple[str, ...]
    entries: Mapping[str, tuple[float, ...]]
    group: str = "frequency"

    def __post_init__(self):
        if self.group not in LEXICON_GROUPS:
            raise SchemaError(f"lexicon {self.name!r}: unknown group {self.group!r}")
        width = len(self.columns)
        for key, values in self.entries.items():
            if len(values) != width:
                raise SchemaError(f"lexicon {self.name!r}: entry {key!r} has wrong width")

    def missing_record(self) -> tuple[float, ...]:
        return (math.nan,) * len(self.columns)


def _better_row(new: tuple[float, ...], old: tuple[float, ...]) -> bool:
    a = new[0] if new else math.nan
    b = old[0] if old else math.nan
    if math.isnan(a):
        return False
    return math.isnan(b) or a > b


def load_lexicon(
    path: str | Path,
    name: str,
    columns: Sequence[str] | None = None,
    group: str = "frequency",
) -> Lexicon:
    """Load a tab-separated resource whose first column is the key.

    The header row names the value columns. ``columns`` selects (and
    orders) a subset of them; when omitted every column is kept. Among rows
    whose keys collide after case-folding, the one with the larger first
    value wins.
    """
    path = Path(path)
    entries: dict[str, tuple[float, ...]] = {}
    with path.open(encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise SchemaError(f"{path}: empty lexicon file")
        header = header_line.rstrip("\r\n").split("\t")
        available = header[1:]
        if columns is None:
            columns = available
        unknown = [c for c in columns if c not in available]
        if unknown:
            raise SchemaError(f"{path}: columns {unknown} not in header")
        picks = [available.index(c) + 1 for c in columns]
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise SchemaError(
                    f"{path} line {lineno}: {len(fields)} fields, header has {len(header)}"
                )
            values = []
            for k in picks:
                cell = fields[k].strip()
                if not cell:
                    values.append(math.nan)
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path} line {lineno}: non-numeric value {cell!r}"
                    ) from None
            key = lookup_key(fields[0])
            record = tuple(values)
            if key not in entries or _better_row(record, entries[key]):
                entries[key] = record
    return Lexicon(name=name, columns=tuple(columns), entries=entries, group=group)


def lookup(lexicon: Lexicon, token: Token) -> tuple[float, ...]:
    """Values for the token's spelling form, falling back to its lemma."""
    if token.normalized:
        hit = lexicon.entries.get(lookup_key(token.normalized))
        if hit is not None:
            return hit
    if token.lemma:
        hit = lexicon.entries.get(lookup_key(token.lemma))
        if hit is not None:
            return hit
    return lexicon.missing_record()


@dataclass(frozen=True)
class BigramTable:
    """Unigram and adjacent-bigram frequencies of a reference corpus."""

    bigram_counts: Mapping[tuple[str, str], int]
    unigram_counts: Mapping[str, int]
    corpus_size: int

    def __post_init__(self):
        if self.corpus_size <= 0:
            raise ConsistencyError("corpus size must be positive")
        for w, c in self.unigram_counts.items():
            if c < 0 or c > self.corpus_size:
                raise ConsistencyError(f"unigram {w!r}: count {c} outside [0, N]")
        for (w1, w2), c in self.bigram_counts.items():
            if c < 0:
                raise ConsistencyError(f"bigram ({w1!r}, {w2!r}) has negative count")
            lim = min(self.unigram_counts.get(w1, 0), self.unigram_counts.get(w2, 0))
            if c > lim:
                raise ConsistencyError(
                    f"bigram ({w1!r}, {w2!r}) count {c} exceeds a unigram count ({lim})"
                )

    def unigram(self, word: str) -> int:
        return self.unigram_counts.get(lookup_key(word), 0)

    def bigram(self, w1: str, w2: str) -> int:
        return self.bigram_counts.get((lookup_key(w1), lookup_key(w2)), 0)

    @cached_property
    def pair_margins(self) -> tuple[dict[str, int], dict[str, int], int]:
        """Counts over bigram tokens: each word as first member, as second
        member, and the total number of bigram tokens."""
        first: Counter = Counter()
        second: Counter = Counter()
        for (w1, w2), c in self.bigram_counts.items():
            first[w1] += c
            second[w2] += c
        return dict(first), dict(second), sum(self.bigram_counts.values())

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> BigramTable:
        """Count unigrams and adjacent pairs of one token stream."""
        keys = [lookup_key(t) for t in tokens]
        return cls(
            bigram_counts=dict(Counter(zip(keys, keys[1:]))),
            unigram_counts=dict(Counter(keys)),
            corpus_size=len(keys),
        )


def load_bigram_counts(path: str | Path) -> BigramTable:
    """Read ``#N``, unigram (``1``) and bigram (``2``) lines of a count file."""
    path = Path(path)
    n = None
    uni: dict[str, int] = {}
    bi: dict[tuple[str, str], int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            tag = fields[0]
            if tag == "#N" and len(fields) == 2:
                n = _parse_int(fields[1], "corpus size", lineno)
            elif tag == "1" and len(fields) == 3:
                key = lookup_key(fields[1])
                uni[key] = uni.get(key, 0) + _parse_int(fields[2], "count", lineno)
            elif tag == "2" and len(fields) == 4:
                key2 = (lookup_key(fields[1]), lookup_key(fields[2]))
                bi[key2] = bi.get(key2, 0) + _parse_int(fields[3], "count", lineno)
            else:
                raise ParseError(f"{path} line {lineno}: unrecognized record")
    if n is None:
        raise ParseError(f"{path}: missing #N line")
    return BigramTable(bigram_counts=bi, unigram_counts=uni, corpus_size=n)


def write_bigram_counts(table: BigramTable, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"#N\t{table.corpus_size}\n")
        for w in sorted(table.unigram_counts):
            fh.write(f"1\t{w}\t{table.unigram_counts[w]}\n")
        for w1, w2 in sorted(table.bigram_counts):
            fh.write(f"2\t{w1}\t{w2}\t{table.bigram_counts[(w1, w2)]}\n")
