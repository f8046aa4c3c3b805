"""Acceptance suite: one test per criterion, each printing a pass/fail line.

The end-to-end runs (criteria 8 and 10) drive the CLI commands in-process.
"""

import filecmp
import json
import math
import time
from importlib import resources
from pathlib import Path

import numpy as np

import oracles
from conftest import ACCEPTANCE
from netstylo.cli import RunConfig, cmd_classify, cmd_features, cmd_synth
from netstylo.fusion import FoldRun, FusionConfig, hybrid_combine, hybrid_decide, sweep, tiebreaker_decide
from netstylo.learn import LabeledDataset, entropy, info_gain
from netstylo.metrics import (accessibility_all, assortativity, betweenness, clustering,
                              saw_distribution, shortest_paths)
from netstylo.network import WordNetwork, build_adjacency_network
from netstylo.style import intermittency_features, recurrence_times
from netstylo.text import Document, LemmaLexicon, StopwordPolicy, Token, preprocess, shuffle_tokens

TABLE1 = (
    "middle road stone stone middle road stone middle road stone never "
    "forget event lifetime fatigue retina never forget middle road stone "
    "stone middle road middle road stone"
).split()


def report(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def doc_of(words):
    return Document("d", "x", tuple(Token(w, w, i) for i, w in enumerate(words)))


def table1_stream():
    raw = (resources.files("netstylo") / "data" / "poem.txt").read_text(encoding="utf-8")
    return preprocess(Document.from_text("poem", "verse", raw), StopwordPolicy.english(), LemmaLexicon.default())


def test_criterion_01_table1_pipeline():
    t0 = time.perf_counter()
    doc = table1_stream()
    net = build_adjacency_network(doc)
    elapsed = time.perf_counter() - t0
    # hand enumeration of the distinct non-loop adjacent pairs
    hand = {frozenset(p) for p in zip(TABLE1, TABLE1[1:]) if p[0] != p[1]}
    ok = (doc.lemmas == TABLE1 and net.n_nodes == 9 and net.n_edges == 11 == len(hand)
          and {frozenset(e) for e in net.edges()} == hand and elapsed < 1.0)
    report(1, ok, f"{doc.n_tokens} tokens, {net.n_nodes} nodes, {net.n_edges} edges in {elapsed:.3f}s")


def test_criterion_02_recurrence_example():
    s = recurrence_times(table1_stream(), "stone")
    ok = s.times[:-1] == (1, 3, 3, 11, 1, 5) and s.wrap == 3 and sum(s.times) == 27
    report(2, ok, f"T={list(s.times[:-1])}, T_N={s.wrap}, sum={sum(s.times)}")


def test_criterion_03_accessibility():
    fig2 = WordNetwork.from_edges(10, [(0, j) for j in range(1, 5)]
                                  + [(j, s) for j in range(1, 5) for s in range(5, 10)])
    alpha = float(accessibility_all(fig2, 2)[0])
    ok_fig = abs(alpha - 5.0) <= 1e-9
    rng = np.random.default_rng(20240601)
    worst_oracle = 0.0
    bound_ok = True
    checked = 0
    for _ in range(200):
        n, edges = oracles.random_graph(rng, max_nodes=12)
        net = WordNetwork.from_edges(n, edges)
        for h in (1, 2, 3):
            closed = accessibility_all(net, h)
            for i in range(n):
                dist = oracles.saw_distribution(n, edges, i, h)
                n_h = len(dist)  # nodes reachable by an h-step self-avoiding walk
                want = oracles.accessibility(n, edges, i, h)
                enum = saw_distribution(net, i, h)
                enum_alpha = math.exp(-sum(p * math.log(p) for p in enum.values() if p > 0)) if enum else 0.0
                worst_oracle = max(worst_oracle, abs(closed[i] - want), abs(enum_alpha - want))
                bound_ok &= -1e-12 <= closed[i] <= n_h + 1e-9
                checked += 1
    ok = ok_fig and bound_ok and worst_oracle <= 1e-9
    report(3, ok, f"alpha_1^(2)={alpha:.12f}; {checked} node/h cases, bound held={bound_ok}, "
                  f"max oracle diff={worst_oracle:.1e}")


def test_criterion_04_graph_metric_oracles():
    t0 = time.perf_counter()
    worst = 0.0
    graphs = oracles.connected_graphs(6)
    for n, edges in graphs:
        net = WordNetwork.from_edges(n, edges)
        worst = max(worst, np.max(np.abs(betweenness(net) - oracles.betweenness(n, edges))))
        local, glob = clustering(net)
        want_local, want_glob = oracles.clustering(n, edges)
        worst = max(worst, np.max(np.abs(local - want_local)), abs(glob - want_glob))
        st = shortest_paths(net)
        per_node, mean, _ = oracles.shortest_paths(n, edges)
        worst = max(worst, np.max(np.abs(st.per_node - per_node)), abs(st.mean - mean))
        r, want_r = assortativity(net), oracles.assortativity(n, edges)
        if math.isnan(want_r) != math.isnan(r):
            worst = math.inf
        elif not math.isnan(r):
            worst = max(worst, abs(r - want_r))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 120 and len(graphs) == 142
    report(4, ok, f"{len(graphs)} connected graphs (2-6 nodes), max diff={worst:.1e}, {elapsed:.1f}s")


def test_criterion_05_intermittency_of_shuffled_text():
    rng = np.random.default_rng(7)
    ranks = rng.zipf(1.3, size=200_000)
    words = [f"w{r}" for r in ranks[ranks <= 2000][:50_000]]
    assert len(words) == 50_000
    doc = shuffle_tokens(doc_of(words), 11)
    values = intermittency_features(doc, set(words), min_count=30).values
    vals = np.array([v for v in values.values() if not math.isnan(v)])
    mean = float(vals.mean())
    ok = 0.9 <= mean <= 1.1 and len(vals) >= 30
    report(5, ok, f"{len(vals)} words with N_i>=30, mean I={mean:.4f} (optional book check skipped: text not supplied)")


def test_criterion_06_fusion_endpoints():
    rng = np.random.default_rng(6)
    n, c = 1000, 8
    mt = rng.dirichlet(np.ones(c), size=n)
    mr = rng.dirichlet(np.ones(c), size=n)
    t_dec, r_dec = np.argmax(mt, axis=1), np.argmax(mr, axis=1)
    ok_h0 = (hybrid_decide(hybrid_combine(mr, mt, 0.0)) == t_dec).all()
    ok_h1 = (hybrid_decide(hybrid_combine(mr, mt, 1.0)) == r_dec).all()
    ok_t0 = (tiebreaker_decide(mt, mr, 0.0) == t_dec).all()
    worst = 0.0
    for _ in range(200):
        l1, l2, t = rng.random(3)
        lhs = t * hybrid_combine(mr, mt, l1) + (1 - t) * hybrid_combine(mr, mt, l2)
        rhs = hybrid_combine(mr, mt, t * l1 + (1 - t) * l2)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    ok = ok_h0 and ok_h1 and ok_t0 and worst <= 1e-12
    report(6, ok, f"lambda=0:{ok_h0} lambda=1:{ok_h1} theta=0:{ok_t0} max affine error={worst:.1e}")


def test_criterion_07_gain_guarantee():
    rng = np.random.default_rng(77)
    worst = math.inf
    for _ in range(50):
        c = int(rng.integers(2, 9))
        runs = []
        for _ in range(int(rng.integers(1, 11))):
            m = int(rng.integers(3, 30))
            y = rng.integers(0, c, m)
            mt = rng.dirichlet(np.ones(c), size=m)
            mt[np.arange(m), y] += rng.random(m)  # keep the traditional accuracy above zero
            mt /= mt.sum(axis=1, keepdims=True)
            runs.append(FoldRun(mt, rng.dirichlet(np.ones(c), size=m), y))
        for mode in ("hybrid", "tiebreaker"):
            rep = sweep(mode, runs, FusionConfig(0.05, 0.05))
            worst = min(worst, rep.best_ratio)
    report(7, worst >= 1, f"min delta_gamma_max over 50 configurations x 2 rules = {worst:.4f}")


def test_criterion_08_end_to_end(tmp_path):
    t0 = time.perf_counter()
    corpus = tmp_path / "corpus"
    cmd_synth(RunConfig(out=str(corpus), seed=0).validate())
    cmd_features(RunConfig(manifest=str(corpus / "manifest.csv"), stopwords=str(corpus / "stopwords.txt"),
                           seed=0, out=str(tmp_path / "features")).validate())
    cmd_classify(RunConfig(features_dir=str(tmp_path / "features"), seed=0, k=(5,),
                           out=str(tmp_path / "classify")).validate())
    elapsed = time.perf_counter() - t0
    gammas, gains = {}, []
    for tag in ("int+net", "stop+net", "bg+net"):
        run = json.loads((tmp_path / "classify" / f"results_{tag}.json").read_text())["runs"][0]
        trad = tag.split("+")[0]
        gammas[trad] = run[trad]["gamma"]
        gammas["net"] = run["net"]["gamma"]
        h = run["hybrid"]
        gains.append((h["delta_gamma_max"], h["argmax"], tag))
    best = max(gains)
    interior = [g for g in gains if g[0] > 1 and 0 < g[1] < 1]
    ok = all(g > 0.8 for g in gammas.values()) and bool(interior) and elapsed < 600
    detail = ", ".join(f"{k}={v:.3f}" for k, v in gammas.items())
    report(8, ok, f"gamma: {detail}; best hybrid {best[2]} delta_gamma_max={best[0]:.3f} "
                  f"at lambda={best[1]}; {elapsed:.0f}s")


def _full_run(root: Path, workers: int, monkeypatch) -> Path:
    # relative paths keep the two configurations identical; only the working directory differs
    root.mkdir(parents=True)
    monkeypatch.chdir(root)
    cmd_synth(RunConfig(out="corpus", seed=2, extra={"docs": 6, "tokens": 1500}).validate())
    cmd_features(RunConfig(manifest="corpus/manifest.csv", stopwords="corpus/stopwords.txt",
                           seed=2, shuffles=4, workers=workers, out="features").validate())
    cmd_classify(RunConfig(features_dir="features", seed=2, k=(1, 3), folds=4, out="classify").validate())
    return root


def test_criterion_10_determinism(tmp_path, monkeypatch):
    a = _full_run(tmp_path / "a", 1, monkeypatch)
    b = _full_run(tmp_path / "b", 2, monkeypatch)
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.suffix in (".csv", ".json"))
    same = [filecmp.cmp(a / f, b / f, shallow=False) for f in files]
    ok = all(same) and len(files) > 10
    report(10, ok, f"{sum(same)}/{len(files)} CSV/JSON outputs byte-identical (workers 1 vs 2)")


def test_criterion_09_information_gain():
    def ds(values, labels):
        return LabeledDataset(np.asarray(values, float).reshape(-1, 1), np.asarray(labels), ("a",))

    h34 = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    cases = [
        (info_gain(ds([0, 0, 1, 1], list("AABB")), "a", 2), 1.0),
        (info_gain(ds([5, 5, 5, 5], list("AABB")), "a", 2), 0.0),
        (info_gain(ds([0, 0, 1, 1], list("AAAB")), "a", 2), h34 - 0.5),
    ]
    ok_cases = all(abs(got - want) <= 1e-9 for got, want in cases)
    rng = np.random.default_rng(9)
    y = rng.choice(list("ABCD"), 80)
    leak = info_gain(ds([ord(v) for v in y], y), "a")
    ok_leak = abs(leak - entropy(y)) <= 1e-12
    lowest = math.inf
    for _ in range(500):
        n = int(rng.integers(2, 60))
        labels = rng.choice(list("ABCDE")[:int(rng.integers(2, 6))], n)
        values = rng.normal(size=n) if rng.random() < 0.5 else rng.integers(0, 4, n)
        lowest = min(lowest, info_gain(ds(values, labels), "a", int(rng.integers(2, 15))))
    ok = ok_cases and ok_leak and lowest >= 0
    report(9, ok, f"analytic cases={ok_cases}, leak omega={leak:.6f} vs H={entropy(y):.6f}, "
                  f"min omega over 500 datasets={lowest:.3g}")
