"""
A stepwise linear baseline
==========================

The comparison model is ordinary least squares on the same features. Each
strictly positive column also gets a log copy, categories are one-hot
encoded and missing cells become 0. Columns enter at p < 0.01 and leave at
p > 0.05.
"""

# %%
from gazeboost.features import build_matrix
from gazeboost.gbdt import TrainConfig
from gazeboost.harness import (
    augment_log_features,
    cross_validate,
    cross_validate_linear,
    kfold_by_sentence,
    stepwise_linreg,
)
from gazeboost.synthetic import make_corpus

corpus = make_corpus(n_sentences=80, seed=4)
m = build_matrix(corpus.sentences, corpus.lexicons, corpus.bigrams)
design = augment_log_features(m)
print(f"{m.n_cols} feature columns -> {design.n_cols} design columns")
print("log copies:", [c for c in design.column_names if c.startswith("log(")])

# %%
# Fit on all rows for one measure and look at the start of the selection path.
model = stepwise_linreg(design, corpus.targets["TRT"])
print(f"{len(model.steps)} steps")
for action, name, p in model.steps[:8]:
    print(f"  {action:<6} {name:<22} p = {p:.2e}")
print(f"intercept {model.intercept:.3f}, {len(model.selected)} columns kept")
print("largest p-value kept:", max(model.p_values.values()))

# %%
# Sentence-level CV against the boosted trees on the same folds.
split = kfold_by_sentence(corpus.sentences, 5, 0)
targets = {"TRT": corpus.targets["TRT"], "GPT": corpus.targets["GPT"]}
linear = cross_validate_linear(m, targets, split)
config = TrainConfig(learning_rate=0.1, num_leaves=8, min_data_in_leaf=10, n_iter=300,
                     early_stopping_rounds=30)
trees = cross_validate(m, targets, config, split)
for dv in targets:
    print(f"{dv}: linear {linear[dv].mean_mae:.3f}  boosted trees {trees[dv].mean_mae:.3f}")
