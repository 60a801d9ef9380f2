"""
Scoring word pairs with association measures
============================================

A bigram table holds unigram and adjacent-pair counts from a reference
corpus. Each pair is turned into a 2x2 contingency table and scored with
eight association measures.
"""

# %%
# Build a bigram table from a token stream. Words are case-folded.
from gazeboost.association import AM_NAMES, am_scores, contingency
from gazeboost.corpus import BigramTable

text = (
    "the cat sat on the mat . the dog sat on the log . "
    "a cat and a dog ran in the park . the cat ran after the dog ."
)
table = BigramTable.from_tokens(text.split())
print(f"{table.corpus_size} tokens, {len(table.unigram_counts)} word types, "
      f"{len(table.bigram_counts)} pair types")

# %%
# The contingency table for "the cat": O11 counts the pair, O12 and O21 count
# each word without the other, and O22 counts everything else.
t = contingency(table, "the", "cat")
print(f"O11={t.o11} O12={t.o12} O21={t.o21} O22={t.o22}  E11={t.e11:.3f}")

# %%
# All eight measures at once. Pairs that never co-occur get NaN for the
# measures that need a positive count.
for w1, w2 in [("the", "cat"), ("sat", "on"), ("cat", "dog")]:
    scores = am_scores(contingency(table, w1, w2))
    row = "  ".join(f"{name}={scores[name]:.3f}" for name in AM_NAMES)
    print(f"{w1} {w2}: {row}")

# %%
# Under exact independence (O11 equal to its expected count) the measures
# that compare observed with expected counts are all zero.
flat = BigramTable({("a", "b"): 2}, {"a": 10, "b": 20}, 100)
print({k: round(v, 12) for k, v in am_scores(contingency(flat, "a", "b")).items()})
