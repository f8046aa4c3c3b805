"""Traditional stylometric features: stopword and character-bigram
frequencies, and word intermittency from recurrence times."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .text import Document, StopwordPolicy, tokenize

DEFAULT_MIN_COUNT = 5
FAMILIES = ("net", "int", "stop", "bg")


@dataclass(frozen=True)
class RecurrenceSeries:
    word: str
    times: tuple[int, ...]   # gaps between successive occurrences, then the wrap term
    n_occurrences: int
    n_tokens: int

    @property
    def wrap(self) -> int:
        return self.times[-1]

    @property
    def mean(self) -> float:
        return self.n_tokens / self.n_occurrences


@dataclass
class FeatureVector:
    family: str
    values: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown feature family {self.family!r}")


def occurrence_positions(doc: Document) -> dict[str, list[int]]:
    """1-based positions of every lemma."""
    pos: dict[str, list[int]] = {}
    for i, lemma in enumerate(doc.lemmas, 1):
        pos.setdefault(lemma, []).append(i)
    return pos


def _series(word: str, positions: list[int], n_tokens: int) -> RecurrenceSeries:
    gaps = [b - a for a, b in zip(positions, positions[1:])]
    # time to the first occurrence plus the words after the last one
    wrap = positions[0] + (n_tokens - positions[-1])
    return RecurrenceSeries(word, tuple(gaps) + (wrap,), len(positions), n_tokens)


def recurrence_times(doc: Document, word: str) -> RecurrenceSeries:
    """Recurrence times of ``word``; the series always sums to the document length."""
    positions = [i for i, lemma in enumerate(doc.lemmas, 1) if lemma == word]
    if not positions:
        raise KeyError(f"{word!r} does not occur in document {doc.id!r}")
    return _series(word, positions, doc.n_tokens)


def intermittency(series: RecurrenceSeries, min_count: int = 2) -> float:
    """Coefficient of variation of the recurrence times.

    NaN when the word occurs fewer than ``max(min_count, 2)`` times.
    """
    if series.n_occurrences < max(min_count, 2):
        return float("nan")
    t = np.asarray(series.times, dtype=float)
    mean = t.mean()
    ratio = (t * t).mean() / (mean * mean)
    return math.sqrt(max(ratio - 1.0, 0.0))


def intermittency_features(doc: Document, words, min_count: int = DEFAULT_MIN_COUNT) -> FeatureVector:
    """Intermittency of each listed word; NaN for absent or rare words."""
    positions = occurrence_positions(doc)
    values = {}
    for w in sorted(words):
        if w in positions:
            values[w] = intermittency(_series(w, positions[w], doc.n_tokens), min_count)
        else:
            values[w] = float("nan")
    return FeatureVector("int", values)


def stopword_frequency_features(doc: Document, policy: StopwordPolicy) -> FeatureVector:
    """Relative frequency of each stopword in the full (unfiltered) stream."""
    counts = Counter(doc.lemmas)
    n = doc.n_tokens
    return FeatureVector("stop", {w: (counts[w] / n if n else 0.0) for w in policy.sorted()})


def char_bigram_features(raw) -> FeatureVector:
    """Relative frequencies of within-token character bigrams of the case-folded text."""
    counts: Counter[str] = Counter()
    for tok in tokenize(raw, case_fold=True):
        s = tok.surface
        counts.update(s[i:i + 2] for i in range(len(s) - 1))
    total = sum(counts.values())
    return FeatureVector("bg", {bg: c / total for bg, c in sorted(counts.items())})
