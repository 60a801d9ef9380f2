import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazeboost.corpus import (
    DVS,
    BigramTable,
    SentenceSet,
    Token,
    attach_annotations,
    load_bigram_counts,
    load_lexicon,
    load_task_csv,
    lookup,
    normalize_token,
    write_bigram_counts,
    write_task_csv,
)
from gazeboost.errors import (
    AlignmentError,
    ConsistencyError,
    ParseError,
    SchemaError,
    StructureError,
    ValidationError,
)

from conftest import sentence_set
from oracles import recount

HEADER = "sentence_id,word_id,word,nFix,FFD,GPT,TRT,fixProp\n"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# task CSV
# ---------------------------------------------------------------------------

def test_load_two_sentences(tmp_path):
    p = write(tmp_path / "t.csv", HEADER + "\n".join([
        "1,0,The,1,2,3,4,5",
        "1,1,cat,1,2,3,4,5",
        "1,2,sat.,1,2,3,4,5",
        "2,0,(Reuters),1,2,3,4,5",
        "2,1,ran,1,2,3,4,100",
    ]) + "\n")
    s = load_task_csv(p)
    assert len(s) == 2
    assert s.has_targets
    assert [t.rank for t in s.sentences[0]] == [1, 2, 3]
    assert s.sentences[1][0].normalized == "Reuters"
    assert s.targets()["fixProp"].tolist() == [5, 5, 5, 5, 100]


def test_one_based_word_ids(tmp_path):
    p = write(tmp_path / "t.csv", "sentence_id,word_id,word\n7,1,a\n7,2,b\n")
    s = load_task_csv(p, expect_targets=False)
    assert [t.rank for t in s.tokens()] == [1, 2]
    assert not s.has_targets


def test_target_out_of_range(tmp_path):
    p = write(tmp_path / "t.csv", HEADER + "1,0,a,1,2,3,4,103\n")
    with pytest.raises(ValidationError, match="fixProp"):
        load_task_csv(p)


def test_malformed_row_reports_line(tmp_path):
    p = write(tmp_path / "t.csv", HEADER + "1,0,a,1,2,3,4,5\n1,1,b,1,2\n")
    with pytest.raises(ParseError, match="line 3"):
        load_task_csv(p)


def test_non_numeric_target(tmp_path):
    p = write(tmp_path / "t.csv", HEADER + "1,0,a,1,x,3,4,5\n")
    with pytest.raises(ParseError, match="line 2"):
        load_task_csv(p)


def test_non_consecutive_word_id(tmp_path):
    p = write(tmp_path / "t.csv", HEADER + "1,0,a,1,2,3,4,5\n1,2,b,1,2,3,4,5\n")
    with pytest.raises(StructureError):
        load_task_csv(p)


def test_split_sentence_rejected(tmp_path):
    p = write(tmp_path / "t.csv", "sentence_id,word_id,word\n1,0,a\n2,0,b\n1,1,c\n")
    with pytest.raises(StructureError, match="contiguous"):
        load_task_csv(p, expect_targets=False)


def test_missing_header_column(tmp_path):
    p = write(tmp_path / "t.csv", "sentence_id,word_id,word\n1,0,a\n")
    with pytest.raises(ParseError, match="nFix"):
        load_task_csv(p, expect_targets=True)


words = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), min_size=1, max_size=8
).filter(lambda w: w.strip() == w and w)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.lists(words, min_size=1, max_size=6), min_size=1, max_size=5),
    st.lists(st.floats(0, 100, allow_nan=False), min_size=5, max_size=5),
)
def test_csv_round_trip(tmp_path_factory, sentences, targets):
    s = sentence_set(sentences)
    tokens = [
        [Token(t.sentence_id, t.word_id, t.rank, t.surface, t.normalized, targets=tuple(targets))
         for t in sent]
        for sent in s.sentences
    ]
    s = SentenceSet(tuple(tuple(t) for t in tokens))
    path = tmp_path_factory.mktemp("rt") / "t.csv"
    write_task_csv(s, path)
    assert load_task_csv(path) == s


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("surface, expected", [
    ("(Reuters)", "Reuters"),
    ("don't", "don't"),
    ("$5,", "5"),
    ('"Hello!"', "Hello"),
    ("...", ""),
    ("e-mail", "e-mail"),
])
def test_normalize_examples(surface, expected):
    assert normalize_token(surface) == expected


@given(st.text(max_size=20))
def test_normalize_idempotent(s):
    once = normalize_token(s)
    assert normalize_token(once) == once


# ---------------------------------------------------------------------------
# annotations
# ---------------------------------------------------------------------------

def test_attach_annotations(tmp_path):
    s = sentence_set([["The", "dogs", "running"]])
    p = write(tmp_path / "a.tsv", "sentence_id\tword_id\tlemma\tpos\n1\t3\trun\tVBG\n")
    out = attach_annotations(s, p)
    tok = out.sentences[0][2]
    assert (tok.lemma, tok.pos) == ("run", "VBG")
    assert out.sentences[0][0].lemma is None


def test_empty_annotation_file_is_identity(tmp_path):
    s = sentence_set([["a", "b"]])
    assert attach_annotations(s, write(tmp_path / "a.tsv", "")) is s


def test_annotation_alignment_error(tmp_path):
    s = sentence_set([["a", "b"], ["c"]])
    with pytest.raises(AlignmentError):
        attach_annotations(s, write(tmp_path / "a.tsv", "9\t9\tx\tNN\n"))


# ---------------------------------------------------------------------------
# lexicons
# ---------------------------------------------------------------------------

def test_lexicon_single_column(tmp_path):
    lex = load_lexicon(write(tmp_path / "f.tsv", "word\tfreq\nthe\t6187267\n"), "bnc")
    assert lex.entries["the"] == (6187267.0,)


def test_lexicon_empty_cell(tmp_path):
    lex = load_lexicon(write(tmp_path / "n.tsv", "word\taoa\tfam\ndog\t\t4.5\n"), "glasgow", group="norms")
    aoa, fam = lex.entries["dog"]
    assert math.isnan(aoa) and fam == 4.5


def test_lexicon_23_columns(tmp_path):
    cols = [f"c{i}" for i in range(23)]
    row = "\t".join(["word"] + cols) + "\n" + "\t".join(["cat"] + [str(i) for i in range(23)]) + "\n"
    lex = load_lexicon(write(tmp_path / "elp.tsv", row), "elp", group="elp_characteristics")
    assert len(lex.columns) == 23 and len(lex.entries["cat"]) == 23


def test_lexicon_column_subset(tmp_path):
    p = write(tmp_path / "e.tsv", "word\ta\tb\tc\ncat\t1\t2\t3\n")
    assert load_lexicon(p, "e", columns=["c", "a"]).entries["cat"] == (3.0, 1.0)
    with pytest.raises(SchemaError):
        load_lexicon(p, "e", columns=["zzz"])


def test_lexicon_errors(tmp_path):
    with pytest.raises(ParseError):
        load_lexicon(write(tmp_path / "a.tsv", "word\tf\ncat\tmany\n"), "a")
    with pytest.raises(SchemaError):
        load_lexicon(write(tmp_path / "b.tsv", "word\tf\tg\ncat\t1\n"), "b")
    with pytest.raises(SchemaError):
        load_lexicon(write(tmp_path / "c.tsv", "word\tf\ncat\t1\n"), "c", group="nonsense")


def test_lexicon_casefold_duplicates_keep_larger(tmp_path):
    p = write(tmp_path / "f.tsv", "word\tf\tg\nThe\t10\t1\nthe\t500\t2\nTHE\t20\t3\n")
    assert load_lexicon(p, "f").entries == {"the": (500.0, 2.0)}


def _tok(normalized, lemma=None):
    return Token(1, 1, 1, normalized, normalized, lemma=lemma)


def test_lookup_precedence(tmp_path):
    lex = load_lexicon(write(tmp_path / "f.tsv", "word\tf\nran\t1\nrun\t2\n"), "f")
    assert lookup(lex, _tok("ran", "run")) == (1.0,)
    assert lookup(lex, _tok("Ran", "run")) == (1.0,)
    lex2 = load_lexicon(write(tmp_path / "g.tsv", "word\tf\nrun\t2\n"), "g")
    assert lookup(lex2, _tok("ran", "run")) == (2.0,)
    assert all(math.isnan(v) for v in lookup(lex2, _tok("xyz", "abc")))
    assert all(math.isnan(v) for v in lookup(lex2, _tok("", None)))


# ---------------------------------------------------------------------------
# bigram counts
# ---------------------------------------------------------------------------

def test_bigram_file(tmp_path):
    p = write(tmp_path / "b.tsv", "#N\t1000\n1\tw1\t10\n1\tw2\t20\n2\tw1\tw2\t5\n")
    t = load_bigram_counts(p)
    assert (t.corpus_size, t.unigram("W1"), t.unigram("w2"), t.bigram("w1", "w2")) == (1000, 10, 20, 5)
    out = tmp_path / "copy.tsv"
    write_bigram_counts(t, out)
    assert load_bigram_counts(out) == t


def test_bigram_consistency_error(tmp_path):
    p = write(tmp_path / "b.tsv", "#N\t1000\n1\tw1\t10\n1\tw2\t20\n2\tw1\tw2\t15\n")
    with pytest.raises(ConsistencyError):
        load_bigram_counts(p)


def test_bigram_file_errors(tmp_path):
    with pytest.raises(ParseError, match="#N"):
        load_bigram_counts(write(tmp_path / "a.tsv", "1\tw\t3\n"))
    with pytest.raises(ParseError, match="line 2"):
        load_bigram_counts(write(tmp_path / "b.tsv", "#N\t5\n3\tx\n"))


def test_counting_matches_recount(rng):
    vocab = ["the", "The", "cat", "sat", "on", "mat", "a", "dog"]
    tokens = [vocab[i] for i in rng.integers(0, len(vocab), 100)]
    table = BigramTable.from_tokens(tokens)
    uni, bi, n = recount(tokens)
    assert dict(table.unigram_counts) == uni
    assert dict(table.bigram_counts) == bi
    assert table.corpus_size == n == 100


@given(st.lists(st.sampled_from(["a", "b", "c", "A", "d"]), min_size=1, max_size=60))
def test_counted_table_invariants(tokens):
    t = BigramTable.from_tokens(tokens)
    assert sum(t.unigram_counts.values()) == t.corpus_size
    for (w1, w2), c in t.bigram_counts.items():
        assert c <= min(t.unigram_counts[w1], t.unigram_counts[w2])


def test_targets_order_and_subset():
    s = sentence_set([["a", "b"], ["c"]])
    y = s.targets()
    assert list(y) == list(DVS)
    np.testing.assert_array_equal(y["nFix"], [1, 2, 1])
    assert s.subset([2]).sentence_ids == [2]
