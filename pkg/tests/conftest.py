import numpy as np
import pytest

from gazeboost.corpus import DVS, SentenceSet, Token, normalize_token
from gazeboost.synthetic import make_corpus


def sentence_set(words_per_sentence, with_targets=True, start_id=1):
    """SentenceSet from lists of surface strings; targets are simple ramps."""
    sentences = []
    for k, words in enumerate(words_per_sentence):
        sid = start_id + k
        toks = []
        for r, w in enumerate(words, start=1):
            targets = tuple(float(10 * j + r) for j in range(len(DVS))) if with_targets else None
            toks.append(Token(sid, r, r, w, normalize_token(w), targets=targets))
        sentences.append(tuple(toks))
    return SentenceSet(tuple(sentences))


@pytest.fixture(scope="session")
def small_corpus():
    return make_corpus(n_sentences=40, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def split_on(X, g, h, min_data_in_leaf, kinds=None):
    """find_best_split over raw values, one bin per distinct value.

    Returns ``(SplitInfo or None, BinnedDataset)``.
    """
    from gazeboost.features import NUMERIC, FeatureMatrix
    from gazeboost.gbdt.binning import bin_features
    from gazeboost.gbdt.splitting import HistogramBuilder, find_best_split

    X = np.asarray(X, dtype=float)
    names = [f"x{j}" for j in range(X.shape[1])]
    kinds = kinds or [NUMERIC] * X.shape[1]
    m = FeatureMatrix(names, list(kinds), dict.fromkeys(names, "frequency"), X)
    binned = bin_features(m, max_bin=max(2, X.shape[0]), min_data_in_bin=1)
    builder = HistogramBuilder(binned.codes, binned.n_bins)
    rows = np.arange(X.shape[0])
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    hist = builder.build(rows, g, h)
    parent = (float(g.sum()), float(h.sum()), X.shape[0])
    return find_best_split(hist, binned.n_bins, binned.is_categorical, parent, min_data_in_leaf), binned


def random_split_case(rng, integer_gradients):
    n = int(rng.integers(8, 65))
    p = int(rng.integers(1, 4))
    X = rng.integers(0, int(rng.integers(2, 12)), size=(n, p)).astype(float)
    if rng.random() < 0.7:
        X[rng.random((n, p)) < 0.15] = np.nan
    if integer_gradients:
        # exact sums in any order, so tied gains are tied bit for bit
        g = rng.integers(-2, 3, n).astype(float)
        h = np.ones(n)
    else:
        g = rng.normal(size=n)
        h = rng.uniform(0.5, 2.0, n)
    return X, g, h, int(rng.integers(1, 5))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
