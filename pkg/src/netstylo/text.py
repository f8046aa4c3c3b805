"""Tokenization, stopword removal, lexicon lemmatization and word shuffling.

Every function here is pure: documents are immutable and each transform
returns a new :class:`Document` whose token positions are renumbered to
match the new stream.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

# alphabetic runs, apostrophes kept only between letters
_WORD_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")


class EncodingError(ValueError):
    """Raised when raw input bytes cannot be decoded."""

    def __init__(self, offset: int, encoding: str, reason: str):
        super().__init__(f"cannot decode input as {encoding} at byte offset {offset}: {reason}")
        self.offset = offset


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    position: int

    def __post_init__(self):
        if not self.lemma:
            raise ValueError("token lemma must be non-empty")


@dataclass(frozen=True)
class Document:
    id: str
    label: str
    tokens: tuple[Token, ...] = ()

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]

    @property
    def vocabulary(self) -> set[str]:
        return {t.lemma for t in self.tokens}

    def with_tokens(self, tokens: Iterable[Token]) -> "Document":
        """Copy of this document holding ``tokens``, positions renumbered."""
        renumbered = tuple(
            Token(t.surface, t.lemma, i) for i, t in enumerate(tokens)
        )
        return replace(self, tokens=renumbered)

    @classmethod
    def from_text(cls, id: str, label: str, raw, case_fold: bool = True) -> "Document":
        return cls(id, label, tuple(tokenize(raw, case_fold=case_fold)))


class LemmaLexicon:
    """Surface form -> lemma lookup with identity fallback.

    Entries are case-folded.  A lexicon whose lemmas are themselves mapped
    elsewhere would not be idempotent and is rejected.
    """

    def __init__(self, entries: Mapping[str, str] | None = None):
        table = {s.casefold(): l.casefold() for s, l in (entries or {}).items()}
        chained = sorted(l for l in set(table.values()) if table.get(l, l) != l)
        if chained:
            raise ValueError(f"lexicon is not idempotent; lemmas mapped again: {chained[:5]}")
        self._table = table

    def __call__(self, surface: str) -> str:
        return self._table.get(surface.casefold(), surface)

    def __len__(self):
        return len(self._table)

    def __contains__(self, surface: str) -> bool:
        return surface.casefold() in self._table

    @classmethod
    def load(cls, path: str | Path) -> "LemmaLexicon":
        """Read a ``surface<TAB>lemma`` file; later duplicates win with a warning."""
        entries: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n\r")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise ValueError(f"{path}:{lineno}: expected 'surface<TAB>lemma'")
                surface, lemma = parts[0].casefold(), parts[1].casefold()
                if surface in entries and entries[surface] != lemma:
                    warnings.warn(
                        f"{path}:{lineno}: duplicate surface {surface!r}, keeping {lemma!r}",
                        stacklevel=2,
                    )
                entries[surface] = lemma
        return cls(entries)

    @classmethod
    def default(cls) -> "LemmaLexicon":
        with resources.as_file(resources.files("netstylo") / "data" / "lexicon_en.tsv") as p:
            return cls.load(p)


@dataclass(frozen=True)
class StopwordPolicy:
    mode: str  # "explicit" or "corpus"
    words: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.mode not in ("explicit", "corpus"):
            raise ValueError(f"unknown stopword mode {self.mode!r}")

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.words

    def __len__(self):
        return len(self.words)

    def sorted(self) -> list[str]:
        return sorted(self.words)

    @classmethod
    def explicit(cls, words: Iterable[str]) -> "StopwordPolicy":
        return cls("explicit", frozenset(w.casefold() for w in words))

    @classmethod
    def load(cls, path: str | Path) -> "StopwordPolicy":
        with open(path, encoding="utf-8") as fh:
            return cls.explicit(w.strip() for w in fh if w.strip())

    @classmethod
    def english(cls) -> "StopwordPolicy":
        with resources.as_file(resources.files("netstylo") / "data" / "stopwords_en.txt") as p:
            return cls.load(p)


def tokenize(raw: str | bytes, case_fold: bool = True, encoding: str = "utf-8") -> list[Token]:
    """Split text into alphabetic word tokens.

    Digits and punctuation separate tokens and are discarded; an apostrophe
    survives only between two letters (``don't``).  Bytes are decoded with
    ``encoding`` and decoding failures raise :class:`EncodingError` carrying
    the offending byte offset.
    """
    if isinstance(raw, (bytes, bytearray)):
        try:
            raw = bytes(raw).decode(encoding)
        except UnicodeDecodeError as exc:
            raise EncodingError(exc.start, encoding, exc.reason) from None
    tokens = []
    for i, m in enumerate(_WORD_RE.finditer(raw)):
        word = m.group().replace("’", "'")
        if case_fold:
            word = word.casefold()
        tokens.append(Token(word, word, i))
    return tokens


def remove_stopwords(doc: Document, policy: StopwordPolicy) -> Document:
    return doc.with_tokens(t for t in doc.tokens if t.lemma not in policy.words)


def lemmatize(doc: Document, lex: LemmaLexicon) -> Document:
    return doc.with_tokens(Token(t.surface, lex(t.surface), t.position) for t in doc.tokens)


def derive_corpus_stopwords(corpus: Sequence[Document]) -> StopwordPolicy:
    """Lemmas present at least once in every document of ``corpus``."""
    if not corpus:
        raise ValueError("cannot derive corpus stopwords from an empty corpus")
    common = set(corpus[0].vocabulary)
    for doc in corpus[1:]:
        common &= doc.vocabulary
    return StopwordPolicy("corpus", frozenset(common))


def shuffle_tokens(doc: Document, seed: int) -> Document:
    """Uniformly permute the token stream; the lemma multiset is unchanged."""
    order = np.random.default_rng(seed).permutation(doc.n_tokens)
    return doc.with_tokens(doc.tokens[i] for i in order)


def preprocess(doc: Document, policy: StopwordPolicy, lex: LemmaLexicon | None = None) -> Document:
    """Network input stream: lemmatize, then drop tokens whose lemma is a stopword.

    Removal matches on lemmas, so inflected forms of a listed stopword go too.
    """
    if lex is not None:
        doc = lemmatize(doc, lex)
    return remove_stopwords(doc, policy)
