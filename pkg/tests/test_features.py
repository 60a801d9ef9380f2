import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gazeboost.corpus import BigramTable, Lexicon, SentenceSet, Token
from gazeboost.errors import ConfigurationError
from gazeboost.features import (
    GROUPS,
    UNKNOWN_ID,
    FeatureGroupSpec,
    FeatureMatrix,
    build_matrix,
    coverage,
    drop_groups,
    length_features,
    load_matrix,
    position_features,
    save_matrix,
)

from conftest import sentence_set


def lexicon(name, columns, group, words=("the", "cat", "sat")):
    entries = {w: tuple(float(i + j) for j in range(len(columns))) for i, w in enumerate(words)}
    return Lexicon(name, tuple(columns), entries, group)


def full_resources():
    """7 frequency, 2 norm and 23 ELP columns."""
    lexicons = [
        lexicon("bnc", ["freq"], "frequency"),
        lexicon("subtl", ["fb", "tw", "usenet", "hal", "google", "subtlex"], "frequency"),
        lexicon("glasgow", ["aoa", "fam"], "norms"),
        lexicon("elp_c", [f"c{i}" for i in range(14)], "elp_characteristics"),
        lexicon("elp_b", [f"b{i}" for i in range(9)], "elp_behavioral"),
    ]
    bigrams = BigramTable.from_tokens("the cat sat on the mat the cat".split())
    return lexicons, bigrams


@pytest.fixture
def corpus():
    s = sentence_set([["The", "cat", "sat."], ["(Reuters)", "zzz"]])
    toks = [
        [Token(t.sentence_id, t.word_id, t.rank, t.surface, t.normalized,
               lemma=t.normalized.lower(), pos="NN" if t.rank % 2 else "VB", targets=t.targets)
         for t in sent]
        for sent in s.sentences
    ]
    return SentenceSet(tuple(tuple(x) for x in toks))


def test_length_features():
    sent = sentence_set([["The", "cat", "sat"]]).sentences[0]
    assert length_features(sent, 1) == (3, 3, 3)
    assert length_features(sent, 0) == (None, 3, 3)
    assert length_features(sent, 2) == (3, 3, None)
    assert length_features(sentence_set([["(Reuters)"]]).sentences[0], 0)[1] == 7


@pytest.mark.parametrize("n, rank, expected", [(10, 3, (3, 0.3)), (7, 7, (7, 1.0)), (1, 1, (1, 1.0))])
def test_position_features(n, rank, expected):
    assert position_features(n, rank) == expected


def test_column_ledger(corpus):
    lexicons, bigrams = full_resources()
    m = build_matrix(corpus, lexicons, bigrams)
    assert m.n_cols == 3 + 2 + 4 + 7 + 2 + 23 + 8 == 49
    assert m.groups == frozenset(GROUPS)
    assert drop_groups(m, {"bigram_am"}).n_cols == 41
    assert m.n_rows == corpus.n_tokens
    assert m.row_keys == [(t.sentence_id, t.rank) for t in corpus.tokens()]
    assert len(set(m.row_keys)) == m.n_rows


def test_length_position_only(corpus):
    m = build_matrix(corpus, spec=FeatureGroupSpec.only("length", "position"))
    assert m.column_names == ["len_prev", "len", "len_next", "rank", "rank_ratio"]
    missing = np.isnan(m.values)
    first = np.array([k[1] == 1 for k in m.row_keys])
    last = np.array([t.rank == len(s) for s in corpus.sentences for t in s])
    np.testing.assert_array_equal(missing[:, 0], first)
    np.testing.assert_array_equal(missing[:, 2], last)
    assert not missing[:, [1, 3, 4]].any()


def test_unknown_token_keeps_length_and_position(corpus):
    lexicons, bigrams = full_resources()
    m = build_matrix(corpus, lexicons, bigrams)
    row = m.values[-1]  # "zzz"
    resource_cols = [j for j, n in enumerate(m.column_names) if m.group_of[n] not in
                     ("length", "position", "postag_lemma")]
    assert all(math.isnan(row[j]) for j in resource_cols)
    assert not math.isnan(m.column("len")[-1]) and m.column("rank")[-1] == 2


def test_am_missing_at_sentence_start(corpus):
    lexicons, bigrams = full_resources()
    m = build_matrix(corpus, lexicons, bigrams)
    first = np.array([k[1] == 1 for k in m.row_keys])
    assert np.isnan(m.column("am_dice")[first]).all()
    # "the cat" occurs twice in the reference stream
    assert m.column("am_dice")[1] == pytest.approx(2 * 2 / (3 + 2))


def test_unknown_group_and_missing_table(corpus):
    with pytest.raises(ConfigurationError):
        build_matrix(corpus, spec={"length", "syntax"})
    with pytest.raises(ConfigurationError):
        build_matrix(corpus, spec={"bigram_am"})
    m = build_matrix(corpus, spec={"length"})
    with pytest.raises(ConfigurationError):
        drop_groups(m, {"nonsense"})
    with pytest.raises(ConfigurationError):
        drop_groups(m, {"position"})


def test_category_dictionaries(corpus):
    m = build_matrix(corpus, spec={"postag_lemma"})
    assert m.category_dicts["pos"] == {"<unk>": 0, "NN": 1, "VB": 2}
    # sentence-initial previous POS is missing, not a category
    assert math.isnan(m.column("pos_prev")[0])
    other = sentence_set([["The", "dog"]])
    other = SentenceSet((tuple(
        Token(t.sentence_id, t.word_id, t.rank, t.surface, t.normalized, lemma="dog", pos="JJ")
        for t in other.sentences[0]
    ),))
    m2 = build_matrix(other, spec={"postag_lemma"}, category_dicts=m.category_dicts)
    assert (m2.column("pos") == UNKNOWN_ID).all()
    assert m2.category_dicts == m.category_dicts


def test_drop_identity_and_all(corpus):
    lexicons, bigrams = full_resources()
    m = build_matrix(corpus, lexicons, bigrams)
    assert drop_groups(m, set()).equals(m)
    empty = drop_groups(m, set(GROUPS))
    assert empty.n_cols == 0 and empty.n_rows == m.n_rows


@given(st.sets(st.sampled_from(GROUPS)), st.sets(st.sampled_from(GROUPS)))
def test_drop_composes(a, b):
    b = b - a
    lexicons, bigrams = full_resources()
    s = sentence_set([["The", "cat", "sat"], ["the", "cat"]])
    m = build_matrix(s, lexicons, bigrams)
    assert drop_groups(m, a | b).equals(drop_groups(drop_groups(m, a), b))


def test_save_load_round_trip(tmp_path, corpus):
    lexicons, bigrams = full_resources()
    m = build_matrix(corpus, lexicons, bigrams)
    save_matrix(m, tmp_path / "m.csv", tmp_path / "m.json")
    back = load_matrix(tmp_path / "m.csv", tmp_path / "m.json")
    assert back.equals(m)
    first = (tmp_path / "m.csv").read_bytes()
    save_matrix(back, tmp_path / "m.csv", tmp_path / "m.json")
    assert (tmp_path / "m.csv").read_bytes() == first


def test_coverage(corpus):
    m = build_matrix(corpus, spec={"length"})
    assert coverage(m)["len_prev"] == pytest.approx(2 / 5)
    assert coverage(m)["len"] == 0


def test_from_array_sentence_ids():
    m = FeatureMatrix.from_array(np.zeros((4, 2)), sentence_ids=[5, 5, 6, 6])
    assert m.row_keys == [(5, 1), (5, 2), (6, 1), (6, 2)]
    assert m.column_names == ["x0", "x1"]


def test_am_margin_choice(corpus):
    lexicons, bigrams = full_resources()
    uni = build_matrix(corpus, lexicons, bigrams, spec={"bigram_am"})
    bi = build_matrix(corpus, lexicons, bigrams, spec={"bigram_am"}, am_margins="bigram")
    # "the cat": unigram margins 3 and 2, bigram-token margins 3 and 2 over N = 7
    assert uni.column("am_dice")[1] == bi.column("am_dice")[1]
    assert uni.column("am_pmi")[1] != bi.column("am_pmi")[1]
    with pytest.raises(ConfigurationError):
        build_matrix(corpus, lexicons, bigrams, am_margins="types")
