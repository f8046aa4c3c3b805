"""Topological measurements of word-adjacency networks.

Per-node measurements come back as float arrays indexed like
``WordNetwork.lemmas``; NaN marks a node where the value is undefined
(e.g. neighbor statistics of an isolated node).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np
import scipy.sparse as sp

from .network import WordNetwork

DEFAULT_ETA = 50
DEFAULT_H = (1, 2, 3)

SUMMARIES = ("mean", "top", "std", "skew")


# -- degree ---------------------------------------------------------------

def degree_stats(net: WordNetwork) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Degree, mean neighbor degree and the (population) deviation of neighbor degrees."""
    if net.n_nodes == 0:
        raise ValueError("empty network")
    a = net.adjacency.astype(float)
    k = net.degrees.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        kn = (a @ k) / k
        second = (a @ (k * k)) / k
        var = np.maximum(second - kn * kn, 0.0)
    kn[k == 0] = np.nan
    dkn = np.sqrt(var)
    dkn[k == 0] = np.nan
    return k, kn, dkn


# -- self-avoiding walks --------------------------------------------------

def saw_distribution(net: WordNetwork, i: int | str, h: int) -> dict[int, float]:
    """Exact h-step self-avoiding walk destination probabilities from node ``i``.

    At each step the walker moves uniformly to one of the unvisited
    neighbors of its current node.  Walks that get stuck lose their mass;
    the surviving mass is renormalized to 1.  Returns ``{}`` if no walk of
    length ``h`` exists.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    start = net.index(i) if isinstance(i, str) else int(i)
    nbrs = [net.neighbors(v) for v in range(net.n_nodes)]
    mass: dict[int, float] = {}

    def walk(node, visited, p, depth):
        if depth == h:
            mass[node] = mass.get(node, 0.0) + p
            return
        options = [v for v in nbrs[node] if v not in visited]
        if not options:
            return
        q = p / len(options)
        for v in options:
            visited.add(v)
            walk(v, visited, q, depth + 1)
            visited.discard(v)

    walk(start, {start}, 1.0, 0)
    total = sum(mass.values())
    if total == 0:
        return {}
    return {j: p / total for j, p in sorted(mass.items())}


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def accessibility(net: WordNetwork, i: int | str, h: int) -> float:
    """exp of the natural-log entropy of :func:`saw_distribution`; 0 if no walk survives."""
    dist = saw_distribution(net, i, h)
    if not dist:
        return 0.0
    return math.exp(_entropy(np.fromiter(dist.values(), dtype=float)))


def _saw_matrices(net: WordNetwork, max_h: int) -> list[np.ndarray]:
    """Unnormalized walk mass for every source at once, for h = 1 .. max_h <= 3.

    Row i of the h-th matrix holds the mass arriving at each node after h
    self-avoiding steps from i; dead ends lose mass.
    """
    As = net.adjacency.astype(float)
    A = As.toarray()
    k = A.sum(axis=1)
    inv_k = np.divide(1.0, k, out=np.zeros_like(k), where=k > 0)

    def right_a(X):
        # X @ A with A symmetric and sparse
        return np.asarray((As @ X.T).T)

    P1 = A * inv_k[:, None]
    out = [P1]
    if max_h == 1:
        return out
    # second step from j: i is already visited, so k_j - 1 choices
    km1 = k - 1
    inv_km1 = np.divide(1.0, km1, out=np.zeros_like(k), where=km1 > 0)
    P2 = right_a(P1 * inv_km1[None, :])
    np.fill_diagonal(P2, 0.0)
    out.append(P2)
    if max_h == 2:
        return out
    # third step from l: visited {i, j}; j is a neighbor of l, i is iff a_il
    D = k[None, :] - 1 - A              # D[i, l]
    invD = np.divide(1.0, D, out=np.zeros_like(D), where=D > 0)
    np.fill_diagonal(invD, 0.0)
    P3 = right_a(P2 * invD)
    # remove walks i -> j -> l -> j that return to j
    P3 -= right_a(invD) * (P1 * inv_km1[None, :])
    np.fill_diagonal(P3, 0.0)
    np.maximum(P3, 0.0, out=P3)
    out.append(P3)
    return out


def _accessibility_from_mass(M: np.ndarray) -> np.ndarray:
    total = M.sum(axis=1)
    alive = total > 1e-300
    P = M[alive] / total[alive, None]
    logs = np.log(P, out=np.zeros_like(P), where=P > 0)
    out = np.zeros(len(M))
    out[alive] = np.exp(-(P * logs).sum(axis=1))
    return out


def accessibility_levels(net: WordNetwork, h_levels: Iterable[int]) -> dict[int, np.ndarray]:
    """Accessibility of every node for each requested h.

    Levels up to 3 share one closed-form pass; deeper levels fall back to
    per-node enumeration.
    """
    levels = sorted(set(h_levels))
    if any(h < 1 for h in levels):
        raise ValueError("h must be >= 1")
    out = {}
    small = [h for h in levels if h <= 3]
    if small:
        mats = _saw_matrices(net, max(small))
        for h in small:
            out[h] = _accessibility_from_mass(mats[h - 1])
    for h in levels:
        if h > 3:
            out[h] = np.array([accessibility(net, i, h) for i in range(net.n_nodes)])
    return out


def accessibility_all(net: WordNetwork, h: int) -> np.ndarray:
    """Accessibility of every node at ``h`` steps."""
    return accessibility_levels(net, [h])[h]


# -- betweenness ----------------------------------------------------------

@numba.njit(cache=True)
def _brandes(indptr, indices, n):
    # returns raw betweenness and, per source, the distance sum and reach count
    cb = np.zeros(n)
    dsum = np.zeros(n)
    reach = np.zeros(n, dtype=np.int64)
    sigma = np.zeros(n)
    dist = np.empty(n, dtype=np.int64)
    delta = np.zeros(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        for v in range(n):
            sigma[v] = 0.0
            dist[v] = -1
            delta[v] = 0.0
        sigma[s] = 1.0
        dist[s] = 0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        reach[s] = tail - 1
        for idx in range(tail - 1, 0, -1):
            w = order[idx]
            dsum[s] += dist[w]
            for p in range(indptr[w], indptr[w + 1]):
                v = indices[p]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            cb[w] += delta[w]
    return cb, dsum, reach


def _bfs_stats(net: WordNetwork):
    cache = net.__dict__.get("_bfs_cache")
    if cache is None:
        a = net.adjacency
        cache = _brandes(a.indptr.astype(np.int64), a.indices.astype(np.int64), net.n_nodes)
        object.__setattr__(net, "_bfs_cache", cache)
    return cache


def betweenness(net: WordNetwork) -> np.ndarray:
    """Geodesic betweenness summed over ordered (s, t) pairs, divided by N^2.

    Endpoints do not count as lying on their own paths; disconnected pairs
    contribute nothing.
    """
    n = net.n_nodes
    return _bfs_stats(net)[0] / float(n * n)


# -- assortativity, clustering, distances ---------------------------------

def assortativity(net: WordNetwork) -> float:
    """Degree correlation across edges; NaN when every endpoint degree is equal."""
    if net.n_edges < 1:
        raise ValueError("assortativity needs at least one edge")
    upper = sp.triu(net.adjacency, k=1).tocoo()
    k = net.degrees.astype(float)
    ki, kj = k[upper.row], k[upper.col]
    e = float(len(ki))
    cross = (ki * kj).sum() / e
    half = (0.5 * (ki + kj)).sum() / e
    square = (0.5 * (ki * ki + kj * kj)).sum() / e
    den = square - half * half
    if np.all(ki == ki[0]) and np.all(kj == ki[0]):
        return float("nan")
    return float((cross - half * half) / den)


def clustering(net: WordNetwork) -> tuple[np.ndarray, float]:
    """Local clustering per node and the global triangle/triple ratio."""
    a = net.adjacency.astype(np.int64)
    k = net.degrees.astype(float)
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0  # triangles at each node
    pairs = k * (k - 1) / 2.0
    local = np.divide(tri, pairs, out=np.zeros_like(pairs), where=pairs > 0)
    triples = pairs.sum()
    glob = float(tri.sum() / triples) if triples > 0 else 0.0  # tri.sum() = 3 x triangles
    return local, glob


@dataclass(frozen=True)
class PathStats:
    per_node: np.ndarray
    mean: float
    unreachable_fraction: float


def shortest_paths(net: WordNetwork) -> PathStats:
    """Mean BFS distance per node and over all ordered reachable pairs."""
    n = net.n_nodes
    _, sums, counts = _bfs_stats(net)
    per_node = np.divide(sums, counts, out=np.full(n, np.nan), where=counts > 0)
    pairs = n * (n - 1)
    total = int(counts.sum())
    mean = float(sums.sum() / total) if total else float("nan")
    frac = float(1 - total / pairs) if pairs else 0.0
    return PathStats(per_node, mean, frac)


# -- summaries --------------------------------------------------------------

@dataclass(frozen=True)
class MetricSummary:
    mean: float
    top: float
    std: float
    skew: float
    top_fallback: bool = False

    def as_dict(self) -> dict[str, float]:
        return {"mean": self.mean, "top": self.top, "std": self.std, "skew": self.skew}


def top_nodes(counts: np.ndarray, lemmas: Sequence[str], eta: int) -> np.ndarray:
    """Indices of the ``eta`` most frequent lemmas; ties go to the smaller lemma."""
    order = sorted(range(len(lemmas)), key=lambda i: (-int(counts[i]), lemmas[i]))
    return np.asarray(order[:eta], dtype=np.int64)


def summarize(values: np.ndarray, counts: np.ndarray, lemmas: Sequence[str],
              eta: int = DEFAULT_ETA, top: np.ndarray | None = None) -> MetricSummary | None:
    """Mean, top-eta mean, deviation and skewness of per-node values.

    Undefined (NaN) nodes are ignored.  Moments are population moments and
    the skewness is 0 for constant values.  Returns ``None`` if no node has
    a defined value.
    """
    if eta < 1:
        raise ValueError("eta must be >= 1")
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values)
    if not ok.any():
        return None
    v = values[ok]
    mean = float(v.mean())
    dev = v - mean
    m2 = float((dev ** 2).mean())
    m3 = float((dev ** 3).mean())
    skew = m3 / m2 ** 1.5 if m2 > 1e-300 else 0.0
    fallback = len(lemmas) < eta
    if top is None:
        top = top_nodes(counts, lemmas, eta)
    tv = values[top]
    tv = tv[np.isfinite(tv)]
    top_mean = float(tv.mean()) if len(tv) else float("nan")
    return MetricSummary(mean, top_mean, math.sqrt(m2), skew, fallback)


def _measure(net: WordNetwork, h_levels: Iterable[int]):
    k, kn, dkn = degree_stats(net)
    table = {"degree": k, "neighbor_degree": kn, "neighbor_degree_std": dkn}
    acc = accessibility_levels(net, h_levels)
    for h in h_levels:
        table[f"accessibility_h{h}"] = acc[h]
    table["betweenness"] = betweenness(net)
    local, glob = clustering(net)
    table["clustering"] = local
    paths = shortest_paths(net)
    table["shortest_path"] = paths.per_node
    return table, glob, paths


def node_metric_table(net: WordNetwork, h_levels: Iterable[int] = DEFAULT_H) -> dict[str, np.ndarray]:
    """All per-node measurements keyed by column name (accessibility per h)."""
    return _measure(net, h_levels)[0]


def network_features(net: WordNetwork, h_levels: Iterable[int] = DEFAULT_H, eta: int = DEFAULT_ETA,
                     metrics: Sequence[str] | None = None) -> dict[str, float]:
    """Document-level summaries named ``<summary>_<metric>[_h<h>]`` plus global values.

    When ``metrics`` is given only those feature names are returned.
    """
    table, glob, paths = _measure(net, h_levels)
    out: dict[str, float] = {}
    top = top_nodes(net.counts, net.lemmas, eta)
    for name, values in table.items():
        s = summarize(values, net.counts, net.lemmas, eta, top)
        for stat in SUMMARIES:
            out[f"{stat}_{name}"] = float("nan") if s is None else s.as_dict()[stat]
    out["assortativity"] = assortativity(net) if net.n_edges else float("nan")
    out["global_clustering"] = glob
    out["global_shortest_path"] = paths.mean
    if metrics is not None:
        return {m: out[m] for m in metrics}
    return out
