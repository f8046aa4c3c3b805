"""Word-adjacency networks and shuffled-text baseline normalization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .text import Document

DEFAULT_SHUFFLES = 30


class DegenerateInputError(ValueError):
    pass


class DegenerateMetricError(ValueError):
    """Too many shuffled realizations left a metric undefined."""


@dataclass(frozen=True, eq=False)
class WordNetwork:
    """Undirected simple graph over the distinct lemmas of a document.

    Nodes are indexed in order of first appearance.  ``adjacency`` is a
    symmetric CSR matrix of ones with an empty diagonal; ``counts[i]`` is the
    number of occurrences of ``lemmas[i]`` in the source stream.
    """

    lemmas: tuple[str, ...]
    counts: np.ndarray
    adjacency: sp.csr_matrix

    @property
    def n_nodes(self) -> int:
        return len(self.lemmas)

    @property
    def n_edges(self) -> int:
        return self.adjacency.nnz // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def index(self, lemma: str) -> int:
        return self._lookup[lemma]

    @property
    def _lookup(self) -> dict[str, int]:
        lookup = self.__dict__.get("_lookup_cache")
        if lookup is None:
            lookup = {w: i for i, w in enumerate(self.lemmas)}
            object.__setattr__(self, "_lookup_cache", lookup)
        return lookup

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def edges(self) -> list[tuple[str, str]]:
        """Edge list as lemma pairs, each edge once with the lower index first."""
        coo = sp.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(self.lemmas[coo.row[o]], self.lemmas[coo.col[o]]) for o in order]

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    @classmethod
    def from_edges(cls, n: int, edges, lemmas: Sequence[str] | None = None,
                   counts: Sequence[int] | None = None) -> "WordNetwork":
        """Network on nodes ``0..n-1`` from index pairs (for analysis of arbitrary graphs)."""
        pairs = np.asarray([(a, b) for a, b in edges if a != b], dtype=np.int64).reshape(-1, 2)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        adj = sp.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        adj.sum_duplicates()
        adj.data[:] = 1
        adj.sort_indices()
        lemmas = tuple(lemmas) if lemmas is not None else tuple(f"n{i}" for i in range(n))
        counts = np.asarray(counts if counts is not None else np.ones(n), dtype=np.int64)
        counts.setflags(write=False)
        return cls(lemmas, counts, adj)

    def write_edge_list(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for a, b in self.edges():
                fh.write(f"{a}\t{b}\n")

    def write_node_table(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for w, c in zip(self.lemmas, self.counts):
                fh.write(f"{w}\t{int(c)}\n")


def network_from_lemmas(lemmas: Sequence[str]) -> WordNetwork:
    if len(lemmas) < 2:
        raise DegenerateInputError(f"need at least 2 tokens to build a network, got {len(lemmas)}")
    index: dict[str, int] = {}
    codes = np.fromiter((index.setdefault(w, len(index)) for w in lemmas), dtype=np.int64, count=len(lemmas))
    n = len(index)
    counts = np.bincount(codes, minlength=n)
    src, dst = codes[:-1], codes[1:]
    keep = src != dst
    src, dst = src[keep], dst[keep]
    rows = np.concatenate([src, dst])
    cols = np.concatenate([dst, src])
    adj = sp.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    adj.sum_duplicates()
    adj.data[:] = 1
    adj.sort_indices()
    counts.setflags(write=False)
    return WordNetwork(tuple(index), counts, adj)


def build_adjacency_network(doc: Document) -> WordNetwork:
    """Link the lemmas of every pair of consecutive tokens.

    Repeated adjacencies collapse to a single edge and a lemma adjacent to
    itself adds no edge.
    """
    return network_from_lemmas(doc.lemmas)


@dataclass(frozen=True)
class BaselineStats:
    name: str
    mean: float
    std: float
    n_realizations: int
    skipped: int = 0

    def __post_init__(self):
        if self.n_realizations < 2:
            raise ValueError("baseline ensemble needs at least 2 realizations")


@dataclass(frozen=True)
class NormalizedValue:
    value: float
    error: float


def realization_seed(seed: int, index: int) -> np.random.SeedSequence:
    # depends only on (seed, index), so realizations can run in any order
    return np.random.SeedSequence([seed, index])


def shuffled_lemmas(lemmas: Sequence[str], seed) -> list[str]:
    order = np.random.default_rng(seed).permutation(len(lemmas))
    return [lemmas[i] for i in order]


def _aggregate(name: str, values: Sequence[float], R: int) -> BaselineStats:
    vals = np.asarray([v for v in values if v is not None and math.isfinite(v)], dtype=float)
    skipped = R - len(vals)
    if skipped > R / 2 or len(vals) < 2:
        raise DegenerateMetricError(f"{name}: undefined on {skipped} of {R} shuffled realizations")
    return BaselineStats(name, float(vals.mean()), float(vals.std(ddof=1)), R, skipped)


def baseline_ensemble(
    doc: Document,
    R: int = DEFAULT_SHUFFLES,
    seed: int = 0,
    metric: str | Callable[[WordNetwork], float] = "mean_degree",
) -> BaselineStats:
    """Mean and sample deviation of one network summary over ``R`` word shuffles.

    ``metric`` is either a feature name produced by
    :func:`netstylo.metrics.network_features` or a callable on a network.
    Realizations where the metric is undefined (NaN) are skipped.
    """
    if R < 2:
        raise ValueError("R must be at least 2")
    if callable(metric):
        fn, name = metric, getattr(metric, "__name__", "metric")
    else:
        from .metrics import network_features

        name = metric

        def fn(net):
            return network_features(net, metrics=[metric])[metric]

    values = [fn(network_from_lemmas(shuffled_lemmas(doc.lemmas, realization_seed(seed, r)))) for r in range(R)]
    return _aggregate(name, values, R)


def baseline_table(
    doc: Document,
    features: Callable[[WordNetwork], Mapping[str, float]],
    R: int = DEFAULT_SHUFFLES,
    seed: int = 0,
) -> dict[str, BaselineStats | None]:
    """Baselines for every named value returned by ``features``.

    Entries undefined on more than half the realizations map to ``None``.
    """
    if R < 2:
        raise ValueError("R must be at least 2")
    samples: dict[str, list[float]] = {}
    for r in range(R):
        net = network_from_lemmas(shuffled_lemmas(doc.lemmas, realization_seed(seed, r)))
        for key, value in features(net).items():
            samples.setdefault(key, []).append(value)
    out: dict[str, BaselineStats | None] = {}
    for key, values in samples.items():
        try:
            out[key] = _aggregate(key, values, R)
        except DegenerateMetricError:
            out[key] = None
    return out


def normalize(raw: float, stats: BaselineStats) -> NormalizedValue:
    """Divide by the shuffled mean; the error scales the relative deviation."""
    if stats.mean == 0:
        raise ZeroDivisionError(f"baseline mean of {stats.name} is zero")
    value = raw / stats.mean
    return NormalizedValue(value, abs(stats.std / stats.mean * value))
