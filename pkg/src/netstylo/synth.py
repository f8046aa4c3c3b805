"""Seeded synthetic corpora for desk-scale experiments.

Each class is a token process over a shared pseudo-word vocabulary:

* function words are drawn from a class-specific distribution and, for
  some classes, switched on in bursts (stopword frequency and
  intermittency signal);
* content words follow a Zipf law whose rank order is partially
  class-specific (character-bigram signal) and, with a class-dependent
  probability, follow a fixed successor of the previous content word
  (word-adjacency topology signal).

Every document draws its own style parameters around the class means, and
the draws for the different signals are independent, so each feature
family errs on different documents.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import write_manifest

_ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z",
           "br", "ch", "cl", "dr", "fl", "gr", "pl", "sh", "st", "th", "tr"]
_NUCLEI = ["a", "e", "i", "o", "u", "ai", "ea", "ou", "io"]
_CODAS = ["", "", "", "n", "r", "s", "t", "l", "m", "nd", "st", "ck"]


@dataclass(frozen=True)
class SynthConfig:
    n_classes: int = 2
    docs_per_class: int = 40
    tokens: int = 5000
    seed: int = 0
    vocabulary: int = 600
    n_function: int = 30
    function_rate: float = 0.45
    zipf_exponent: float = 1.05
    successors: int = 2
    # class means and per-document spread of the style parameters
    chain_prob: tuple[float, float] = (0.20, 0.04)
    chain_step: float = 0.10
    function_shift: float = 0.12
    function_noise: float = 0.09
    burst_len: tuple[float, float] = (40.0, 12.0)
    burst_step: float = 25.0
    rank_swap: float = 0.10
    rank_noise: float = 0.35

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("a classification corpus needs at least 2 classes")
        if self.docs_per_class < 1 or self.tokens < 2:
            raise ValueError("docs_per_class must be >= 1 and tokens >= 2")


def _pseudo_words(rng: np.random.Generator, n: int, syllables: tuple[int, int]) -> list[str]:
    words: list[str] = []
    seen = set()
    while len(words) < n:
        k = int(rng.integers(syllables[0], syllables[1] + 1))
        w = "".join(rng.choice(_ONSETS) + rng.choice(_NUCLEI) for _ in range(k)) + rng.choice(_CODAS)
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


class _ClassModel:
    def __init__(self, cfg: SynthConfig, c: int, rng: np.random.Generator, base_rank: np.ndarray):
        self.cfg = cfg
        self.c = c
        # class-specific content rank order: swap a fraction of adjacent-ish ranks
        order = base_rank.copy()
        n_swap = int(cfg.rank_swap * len(order))
        for _ in range(n_swap):
            a = int(rng.integers(0, len(order)))
            b = min(len(order) - 1, a + int(rng.integers(1, 30)))
            order[a], order[b] = order[b], order[a]
        self.order = order
        # class-specific function-word distribution
        f = np.exp(rng.normal(0.0, 1.0, cfg.n_function))
        self.function_logits = np.log(f / f.sum())
        self.function_dir = rng.normal(0.0, 1.0, cfg.n_function)


def _zipf_weights(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


def _document(cfg: SynthConfig, model: _ClassModel, base_order: np.ndarray, successors: np.ndarray,
              function_words: list[str], content_words: list[str], rng: np.random.Generator) -> str:
    c = model.c
    chain = float(np.clip(rng.normal(cfg.chain_prob[0] + cfg.chain_step * c, cfg.chain_prob[1]), 0.0, 0.95))
    mix = float(np.clip(rng.normal(1.0, cfg.rank_noise), 0.0, 1.0))
    logits = (model.function_logits + cfg.function_shift * c * model.function_dir
              + rng.normal(0.0, cfg.function_noise * 4, cfg.n_function))
    fprob = np.exp(logits - logits.max())
    fprob /= fprob.sum()
    burst = max(2.0, rng.normal(cfg.burst_len[0] + cfg.burst_step * c, cfg.burst_len[1]))

    zipf = _zipf_weights(cfg.vocabulary, cfg.zipf_exponent)
    content_p = np.zeros(cfg.vocabulary)
    content_p[model.order] += mix * zipf
    content_p[base_order] += (1.0 - mix) * zipf

    n = cfg.tokens
    is_function = rng.random(n) < cfg.function_rate
    u_chain = rng.random(n)
    content_draw = rng.choice(cfg.vocabulary, size=n, p=content_p)
    succ_pick = rng.integers(0, successors.shape[1], size=n)
    tokens = []
    prev = -1
    active = np.ones(cfg.n_function, dtype=bool)
    until = 0
    for t in range(n):
        if t >= until:
            # each burst keeps a random half of the function words active
            active = rng.random(cfg.n_function) < 0.5
            if not active.any():
                active[int(rng.integers(cfg.n_function))] = True
            until = t + int(rng.geometric(1.0 / burst))
        if is_function[t]:
            p = np.where(active, fprob, fprob * 0.2)
            tokens.append(function_words[int(rng.choice(cfg.n_function, p=p / p.sum()))])
            continue
        if prev >= 0 and u_chain[t] < chain:
            w = int(successors[prev, succ_pick[t]])
        else:
            w = int(content_draw[t])
        tokens.append(content_words[w])
        prev = w
    lines = [" ".join(tokens[i:i + 12]) for i in range(0, len(tokens), 12)]
    return "\n".join(lines) + "\n"


def generate_corpus(cfg: SynthConfig, out: str | Path) -> Path:
    """Write ``texts/*.txt``, ``manifest.csv`` and ``stopwords.txt`` under ``out``."""
    out = Path(out)
    (out / "texts").mkdir(parents=True, exist_ok=True)
    root = np.random.SeedSequence(cfg.seed)
    vocab_seq, class_seq, doc_seq = root.spawn(3)
    vrng = np.random.default_rng(vocab_seq)
    function_words = _pseudo_words(vrng, cfg.n_function, (1, 1))
    content_words = [w for w in _pseudo_words(vrng, cfg.vocabulary + cfg.n_function, (2, 3))
                     if w not in set(function_words)][:cfg.vocabulary]
    base_order = np.arange(cfg.vocabulary)
    successors = vrng.integers(0, cfg.vocabulary, size=(cfg.vocabulary, cfg.successors))
    crngs = [np.random.default_rng(s) for s in class_seq.spawn(cfg.n_classes)]
    models = [_ClassModel(cfg, c, crngs[c], base_order) for c in range(cfg.n_classes)]
    entries = []
    doc_seqs = doc_seq.spawn(cfg.n_classes * cfg.docs_per_class)
    for c in range(cfg.n_classes):
        for d in range(cfg.docs_per_class):
            idx = c * cfg.docs_per_class + d
            text = _document(cfg, models[c], base_order, successors, function_words, content_words,
                             np.random.default_rng(doc_seqs[idx]))
            doc_id = f"c{c}_d{d:03d}"
            rel = f"texts/{doc_id}.txt"
            (out / rel).write_text(text, encoding="utf-8")
            entries.append((doc_id, rel, f"class{c}"))
    write_manifest(out / "manifest.csv", entries)
    (out / "stopwords.txt").write_text("\n".join(sorted(function_words)) + "\n", encoding="utf-8")
    return out / "manifest.csv"
