import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netstylo.style import (FeatureVector, RecurrenceSeries, char_bigram_features, intermittency,
                            intermittency_features, occurrence_positions, recurrence_times,
                            stopword_frequency_features)
from netstylo.text import Document, StopwordPolicy, Token, shuffle_tokens

TABLE1 = (
    "middle road stone stone middle road stone middle road stone never "
    "forget event lifetime fatigue retina never forget middle road stone "
    "stone middle road middle road stone"
).split()


def doc_of(words):
    return Document("d", "x", tuple(Token(w, w, i) for i, w in enumerate(words)))


def test_stone_recurrence():
    s = recurrence_times(doc_of(TABLE1), "stone")
    positions = [i for i, w in enumerate(TABLE1, 1) if w == "stone"]
    assert positions == [3, 4, 7, 10, 21, 22, 27]
    assert s.times[:-1] == (1, 3, 3, 11, 1, 5)
    assert s.wrap == 3
    assert sum(s.times) == 27
    assert s.n_occurrences == 7


def test_word_everywhere():
    s = recurrence_times(doc_of(["a"] * 6), "a")
    assert set(s.times) == {1}


def test_absent_word():
    with pytest.raises(KeyError):
        recurrence_times(doc_of(TABLE1), "zebra")


@given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=200))
def test_recurrence_invariants(words):
    doc = doc_of(words)
    for w, pos in occurrence_positions(doc).items():
        s = recurrence_times(doc, w)
        assert sum(s.times) == len(words)
        assert len(s.times) == len(pos)
        assert np.mean(s.times) == pytest.approx(len(words) / len(pos), rel=1e-12)
        assert s.mean == len(words) / len(pos)


def test_intermittency_examples():
    assert intermittency(RecurrenceSeries("w", (2, 2, 2), 3, 6)) == 0.0
    assert intermittency(RecurrenceSeries("w", (1, 3), 2, 4)) == pytest.approx(0.5)


def test_intermittency_threshold():
    s = RecurrenceSeries("w", (1, 3), 2, 4)
    assert math.isnan(intermittency(s, min_count=5))
    assert math.isnan(intermittency(RecurrenceSeries("w", (4,), 1, 4), min_count=0))


def test_shuffled_intermittency_near_one():
    rng = np.random.default_rng(5)
    words = [f"w{int(i)}" for i in rng.integers(0, 200, size=20000)]
    doc = shuffle_tokens(doc_of(words), 7)
    vals = intermittency_features(doc, set(words), min_count=30).values
    vals = np.array([v for v in vals.values() if not math.isnan(v)])
    assert len(vals) > 150
    assert np.mean((vals >= 0.7) & (vals <= 1.3)) >= 0.95


def test_intermittency_features_missing():
    doc = doc_of(list("ababababac"))
    fv = intermittency_features(doc, ["a", "c", "z"], min_count=2)
    assert fv.family == "int"
    assert not math.isnan(fv.values["a"])
    assert math.isnan(fv.values["c"]) and math.isnan(fv.values["z"])


def test_stopword_frequencies():
    fv = stopword_frequency_features(doc_of(["the", "cat", "the"]), StopwordPolicy.explicit(["the", "of"]))
    assert fv.values == {"of": 0.0, "the": pytest.approx(2 / 3)}


@given(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=50))
def test_stopword_frequency_sum(words):
    fv = stopword_frequency_features(doc_of(words), StopwordPolicy.explicit("abc"))
    total = sum(fv.values.values())
    assert total <= 1 + 1e-12
    assert (abs(total - 1) < 1e-12) == all(w in "abc" for w in words)


def test_bigrams():
    assert char_bigram_features("aaa").values == {"aa": 1.0}
    assert char_bigram_features("ab ba").values == {"ab": 0.5, "ba": 0.5}
    assert char_bigram_features("").values == {}
    # no bigram spans a token boundary and case is folded
    assert set(char_bigram_features("Ab Cd").values) == {"ab", "cd"}


def test_unknown_family():
    with pytest.raises(ValueError):
        FeatureVector("xyz")
