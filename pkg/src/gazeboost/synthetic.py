"""Synthetic reading corpora for tests, demos and smoke runs.

The generator draws a Zipf-distributed vocabulary, a reference corpus for
bigram counts, annotated sentences, two lexicons, and five reading
measures that depend non-linearly on word length, position and frequency.
Nothing here is fitted to real eye-tracking data.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .corpus import (
    BigramTable,
    Lexicon,
    SentenceSet,
    Token,
    normalize_token,
    write_bigram_counts,
    write_task_csv,
)

POS_TAGS = ("DT", "NN", "VB", "JJ", "IN", "RB", "PRP", "CC")


@dataclass
class SyntheticCorpus:
    sentences: SentenceSet
    lexicons: list[Lexicon]
    bigrams: BigramTable
    log_freq: np.ndarray  # true per-token log10 frequency per million

    @property
    def targets(self) -> dict[str, np.ndarray]:
        return self.sentences.targets()


def _vocabulary(rng: np.random.Generator, size: int) -> tuple[list[str], np.ndarray]:
    lengths = np.clip(np.round(rng.gamma(4.0, 1.3, size)), 1, 14).astype(int)
    # frequent words tend to be short
    lengths = np.sort(lengths)
    lengths = lengths[np.argsort(np.arange(size) + rng.normal(0, size / 8, size), kind="stable")]
    words, seen = [], set()
    for n in lengths:
        while True:
            w = "".join(rng.choice(list(string.ascii_lowercase), int(n)))
            if w not in seen:
                seen.add(w)
                words.append(w)
                break
    p = 1.0 / np.arange(1, size + 1) ** 1.1
    return words, p / p.sum()


def reading_measures(length: np.ndarray, rank: np.ndarray, sent_len: np.ndarray,
                     log_freq: np.ndarray, rng: np.random.Generator, noise: float = 1.0) -> np.ndarray:
    """Five measures in [0, 100] for each token, shape ``(n, 5)``.

    A latent effort score combines length, rarity and position with
    thresholds and interactions; each measure is a noisy rescaling of it.
    """
    rare = log_freq < 1.0
    effort = (
        1.8 * length * np.where(rare, 1.5, 0.5)
        + 12.0 * (rank == 1)
        - 6.0 * (rank == sent_len)
        + 4.0 * (log_freq < 0.0)
        + 3.0 * np.sin(np.pi * rank / sent_len)
    )
    n = len(length)
    out = np.column_stack([
        5.0 + 2.0 * effort + rng.normal(0, 3.0 * noise, n),
        8.0 + 0.4 * effort + rng.normal(0, 1.0 * noise, n),
        5.0 + 1.2 * effort + rng.normal(0, 3.0 * noise, n),
        5.0 + 1.5 * effort + rng.normal(0, 2.0 * noise, n),
        100.0 / (1.0 + np.exp(-(effort - 8.0) / 3.0)) + rng.normal(0, 5.0 * noise, n),
    ])
    return np.clip(out, 0.0, 100.0)


def make_corpus(n_sentences: int = 100, seed: int = 0, vocab_size: int = 600,
                reference_size: int = 20000, noise: float = 1.0,
                with_targets: bool = True) -> SyntheticCorpus:
    """Generate a corpus with annotations, two lexicons and bigram counts.

    About a tenth of the vocabulary is absent from each lexicon so the
    lookup fallback and missing cells are exercised.
    """
    rng = np.random.default_rng(seed)
    words, p = _vocabulary(rng, vocab_size)
    # reference corpus: Zipf draws with sticky successors to create collocations
    successor = rng.integers(0, vocab_size, vocab_size)
    ref = np.empty(reference_size, dtype=np.int64)
    ref[0] = rng.choice(vocab_size, p=p)
    draws = rng.choice(vocab_size, size=reference_size, p=p)
    sticky = rng.random(reference_size) < 0.25
    for i in range(1, reference_size):
        ref[i] = successor[ref[i - 1]] if sticky[i] else draws[i]
    bigrams = BigramTable.from_tokens([words[i] for i in ref])
    counts = np.bincount(ref, minlength=vocab_size)
    per_million = (counts + 0.5) / reference_size * 1e6
    log_freq = np.log10(per_million) - 3.0

    lex_freq = {}
    lex_norms = {}
    for i, w in enumerate(words):
        if rng.random() > 0.1:
            lex_freq[w] = (float(round(per_million[i], 3)), float(counts[i] > 0))
        if rng.random() > 0.1:
            aoa = float(np.clip(12.0 - 1.5 * log_freq[i] + rng.normal(0, 1.0), 1.0, 20.0))
            lex_norms[w] = (round(aoa, 3), float(rng.choice([math.nan, round(rng.uniform(1, 7), 3)])))
    lexicons = [
        Lexicon("freq", ("per_million", "attested"), lex_freq, "frequency"),
        Lexicon("norms", ("aoa", "familiarity"), lex_norms, "norms"),
    ]

    sentences, lf = [], []
    for sid in range(1, n_sentences + 1):
        n = int(rng.integers(6, 21))
        idx = rng.choice(vocab_size, size=n, p=p)
        toks = []
        for r, wi in enumerate(idx, start=1):
            surface = words[wi]
            if r == 1:
                surface = surface.capitalize()
            if r == n:
                surface += "."
            elif rng.random() < 0.06:
                surface += ","
            pos = POS_TAGS[wi % len(POS_TAGS)]
            lemma = words[wi][:-1] if len(words[wi]) > 4 and words[wi].endswith("s") else words[wi]
            toks.append(Token(sid, r, r, surface, normalize_token(surface), lemma, pos))
        sentences.append(toks)
        lf.extend(log_freq[idx])
    log_freq_tok = np.array(lf)

    flat = [t for s in sentences for t in s]
    if with_targets:
        length = np.array([len(t.normalized) for t in flat], dtype=float)
        rank = np.array([t.rank for t in flat], dtype=float)
        sent_len = np.array([len(s) for s in sentences for _ in s], dtype=float)
        y = reading_measures(length, rank, sent_len, log_freq_tok, rng, noise)
        k = 0
        for s in sentences:
            for j, t in enumerate(s):
                s[j] = Token(t.sentence_id, t.word_id, t.rank, t.surface, t.normalized,
                             t.lemma, t.pos, tuple(float(v) for v in y[k]))
                k += 1
    return SyntheticCorpus(
        SentenceSet(tuple(tuple(s) for s in sentences)), lexicons, bigrams, log_freq_tok
    )


def _write_lexicon(lex: Lexicon, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write("\t".join(("word",) + lex.columns) + "\n")
        for key in sorted(lex.entries):
            cells = ["" if math.isnan(v) else repr(v) for v in lex.entries[key]]
            fh.write("\t".join([key] + cells) + "\n")


def split_sentences(s: SentenceSet, n_test: int) -> tuple[SentenceSet, SentenceSet]:
    """Last ``n_test`` sentences become a held-out set without targets."""
    train = SentenceSet(s.sentences[:-n_test])
    test = SentenceSet(tuple(
        tuple(replace(t, targets=None) for t in sent) for sent in s.sentences[-n_test:]
    ))
    return train, test


def write_fixture(corpus: SyntheticCorpus, directory: str | Path, test: SentenceSet | None = None,
                  config: dict | None = None) -> Path:
    """Write the corpus as input files plus a run manifest; returns the manifest path.

    ``test`` (for instance from :func:`split_sentences`) is written as an
    unlabelled test set with its own annotation file.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"train": "train.csv", "train_annotations": "train.ann.tsv"}

    def annotations(s: SentenceSet, path: Path) -> None:
        with path.open("w", encoding="utf-8") as fh:
            fh.write("sentence_id\tword_id\tlemma\tpos\n")
            for t in s.tokens():
                fh.write(f"{t.sentence_id}\t{t.word_id}\t{t.lemma}\t{t.pos}\n")

    write_task_csv(corpus.sentences, d / "train.csv")
    annotations(corpus.sentences, d / "train.ann.tsv")
    if test is not None:
        write_task_csv(test, d / "test.csv")
        annotations(test, d / "test.ann.tsv")
        manifest.update(test="test.csv", test_annotations="test.ann.tsv")
    manifest["lexicons"] = []
    for lex in corpus.lexicons:
        _write_lexicon(lex, d / f"{lex.name}.tsv")
        manifest["lexicons"].append({"path": f"{lex.name}.tsv", "name": lex.name, "group": lex.group})
    write_bigram_counts(corpus.bigrams, d / "bigrams.tsv")
    manifest["bigrams"] = "bigrams.tsv"
    manifest["groups"] = ["length", "position", "postag_lemma", "frequency", "norms", "bigram_am"]
    manifest["config"] = config if config is not None else {
        "objective": "mae", "learning_rate": 0.1, "num_leaves": 8, "min_data_in_leaf": 5,
        "n_iter": 60, "early_stopping_rounds": 20,
    }
    manifest["folds"] = 5
    manifest["output_dir"] = "out"
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return path


__all__ = ["SyntheticCorpus", "make_corpus", "reading_measures", "split_sentences", "write_fixture"]
