"""
From tokens to a feature matrix
===============================

Word-level features come in groups: length, position, POS and lemma
categories, corpus frequencies, rating norms, lexical-decision data and
bigram association with the previous word. This demo builds the matrix for a
synthetic corpus whose resource files follow the same schemas as real ones.
"""

# %%
# A synthetic corpus bundles sentences with five reading measures, two
# lexicons and a reference bigram table. Some words are missing from each
# lexicon, just as with real resources.
import numpy as np

from gazeboost.features import build_matrix, coverage, drop_groups
from gazeboost.synthetic import make_corpus, split_sentences

corpus = make_corpus(n_sentences=60, seed=0)
sentences = corpus.sentences
print(f"{len(sentences.sentences)} sentences, {sentences.n_tokens} tokens")
print("first sentence:", " ".join(t.surface for t in sentences.sentences[0]))

# %%
# Build the matrix. Every row is one token keyed by (sentence, rank).
m = build_matrix(sentences, corpus.lexicons, corpus.bigrams)
print(f"{m.n_rows} rows x {m.n_cols} columns")
for group in sorted(m.groups):
    cols = [c for c in m.column_names if m.group_of[c] == group]
    print(f"  {group:<13} {cols}")

# %%
# Missing cells stay NaN; the boosted trees learn a default direction for
# them. Sentence-initial tokens have no previous word, so their association
# scores and previous-word length are missing.
miss = coverage(m)
for name in ("len_prev", "len_next", "freq:per_million", "norms:aoa", "am_pmi"):
    print(f"  {name:<17} missing {100 * miss[name]:5.1f}%")

# %%
# Dropping groups gives the matrices used for ablation.
only_lp = drop_groups(m, m.groups - {"length", "position"})
print("length+position only:", only_lp.column_names)

# %%
# Category ids are assigned on the training data. A test matrix built with
# the same dictionaries maps unseen categories to the unknown id.
train, test = split_sentences(sentences, 12)
m_train = build_matrix(train, corpus.lexicons, corpus.bigrams)
m_test = build_matrix(test, corpus.lexicons, corpus.bigrams, category_dicts=m_train.category_dicts)
print(f"test matrix: {m_test.n_rows} rows; lemmas unseen in training:",
      int(np.sum(m_test.column("lemma") == 0)))
