"""Per-document feature extraction for all four feature families."""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import metrics
from .network import DEFAULT_SHUFFLES, baseline_table, network_from_lemmas, normalize
from .style import (DEFAULT_MIN_COUNT, char_bigram_features, intermittency_features,
                    stopword_frequency_features)
from .text import Document, LemmaLexicon, StopwordPolicy, derive_corpus_stopwords, lemmatize, remove_stopwords


@dataclass(frozen=True)
class ExtractionSettings:
    h_levels: tuple[int, ...] = metrics.DEFAULT_H
    eta: int = metrics.DEFAULT_ETA
    shuffles: int = DEFAULT_SHUFFLES
    seed: int = 0
    min_count: int = DEFAULT_MIN_COUNT


@dataclass
class DocumentFeatures:
    id: str
    label: str
    families: dict[str, dict[str, float]] = field(default_factory=dict)
    n_tokens: int = 0
    n_network_tokens: int = 0


def document_seed(seed: int, doc_id: str) -> int:
    """Per-document seed depending only on the run seed and the document id."""
    ss = np.random.SeedSequence([seed, zlib.crc32(doc_id.encode("utf-8"))])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def network_family(net_doc: Document, settings: ExtractionSettings) -> dict[str, float]:
    """Raw, shuffle-normalized and error columns for every network summary."""
    out: dict[str, float] = {}
    if net_doc.n_tokens < 2:
        return out

    def summaries(net):
        return metrics.network_features(net, settings.h_levels, settings.eta)

    raw = summaries(network_from_lemmas(net_doc.lemmas))
    base = baseline_table(net_doc, summaries, settings.shuffles, document_seed(settings.seed, net_doc.id))
    for name, value in raw.items():
        out[name] = value
        stats = base.get(name)
        if stats is None or stats.mean == 0 or not math.isfinite(value):
            out[f"{name}_norm"] = out[f"{name}_eps"] = float("nan")
            continue
        nv = normalize(value, stats)
        out[f"{name}_norm"] = nv.value
        out[f"{name}_eps"] = nv.error
    return out


def extract_document(doc: Document, raw: bytes | str, policy: StopwordPolicy,
                     settings: ExtractionSettings) -> DocumentFeatures:
    """Features of one document.

    ``doc`` is the full lemmatized stream; stopword frequencies and
    intermittencies are measured on it, the network on its stopword-free
    remainder, and character bigrams on the raw text.
    """
    net_doc = remove_stopwords(doc, policy)
    fams = {
        "net": network_family(net_doc, settings),
        "int": intermittency_features(doc, policy.words, settings.min_count).values,
        "stop": stopword_frequency_features(doc, policy).values if len(policy) else {},
        "bg": char_bigram_features(raw).values,
    }
    return DocumentFeatures(doc.id, doc.label, fams, doc.n_tokens, net_doc.n_tokens)


def _extract_job(args):
    return extract_document(*args)


def extract_corpus(docs: Sequence[Document], raws: Sequence[bytes | str], policy: StopwordPolicy,
                   settings: ExtractionSettings, workers: int = 1) -> list[DocumentFeatures]:
    """Extract every document; output order and values do not depend on ``workers``."""
    jobs = [(d, r, policy, settings) for d, r in zip(docs, raws)]
    if workers <= 1:
        return [_extract_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_extract_job, jobs))


def load_documents(entries, lexicon: LemmaLexicon | None) -> tuple[list[Document], list[bytes]]:
    docs, raws = [], []
    for e in entries:
        raw = e.read_bytes()
        doc = Document.from_text(e.id, e.label, raw)
        if lexicon is not None:
            doc = lemmatize(doc, lexicon)
        docs.append(doc)
        raws.append(raw)
    return docs, raws


def resolve_lexicon(spec: str | None) -> LemmaLexicon | None:
    """``english`` is the bundled table, ``none`` disables lemmatization; else a file path."""
    if spec is None or spec == "none":
        return None
    if spec == "english":
        return LemmaLexicon.default()
    return LemmaLexicon.load(spec)


def resolve_policy(spec: str, docs: Sequence[Document]) -> StopwordPolicy:
    """``corpus`` derives the list from ``docs``; ``english`` is the bundled list; else a file path."""
    if spec == "corpus":
        return derive_corpus_stopwords(docs)
    if spec == "english":
        return StopwordPolicy.english()
    return StopwordPolicy.load(spec)


def family_columns(features: Sequence[DocumentFeatures], family: str) -> list[str]:
    """Column order for one family: first-seen order for ``net``, sorted otherwise."""
    seen: dict[str, None] = {}
    for f in features:
        for name in f.families.get(family, {}):
            seen.setdefault(name, None)
    cols = list(seen) if family == "net" else sorted(seen)
    return [f"{family}_{c}" for c in cols]
