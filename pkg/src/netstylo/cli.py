"""Command-line driver: synth, features, classify, metrics-dump.

Exit codes: 0 success, 2 invalid configuration or unreadable input, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, metrics
from .corpus import ManifestError, read_feature_csv, read_manifest, write_feature_csv
from .features import (ExtractionSettings, extract_corpus, family_columns, load_documents,
                       resolve_lexicon, resolve_policy)
from .fusion import FoldRun, FusionConfig, sweep
from .learn import cross_validate, make_classifier, make_folds, rank_attributes
from .network import DEFAULT_SHUFFLES, build_adjacency_network
from .style import DEFAULT_MIN_COUNT, FAMILIES
from .synth import SynthConfig, generate_corpus
from .text import remove_stopwords

log = logging.getLogger("netstylo")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3

# fields that locate outputs or tune parallelism; they never change results
_UNHASHED = ("out", "workers", "features_dir")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    manifest: str | None = None
    lexicon: str = "english"
    stopwords: str = "english"
    h: tuple[int, ...] = metrics.DEFAULT_H
    eta: int = metrics.DEFAULT_ETA
    shuffles: int = DEFAULT_SHUFFLES
    seed: int = 0
    min_count: int = DEFAULT_MIN_COUNT
    classifier: str = "fknn"
    k: tuple[int, ...] = (5,)
    folds: int = 10
    lambda_step: float = 0.01
    theta_step: float = 0.01
    bins: int = 10
    pairs: tuple[tuple[str, str], ...] = (("int", "net"), ("stop", "net"), ("bg", "net"))
    out: str = "out"
    workers: int = 1
    features_dir: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if any(h < 1 for h in self.h) or not self.h:
            raise ConfigError("--h levels must be positive integers")
        if self.eta < 1:
            raise ConfigError("--eta must be >= 1")
        if self.shuffles < 2:
            raise ConfigError("--shuffles must be >= 2")
        if self.classifier not in ("fknn", "centroid"):
            raise ConfigError(f"unknown classifier {self.classifier!r}")
        if not self.k or any(k < 1 for k in self.k):
            raise ConfigError("--k values must be >= 1")
        if self.folds < 2:
            raise ConfigError("--folds must be >= 2")
        if self.bins < 2:
            raise ConfigError("--bins must be >= 2")
        if self.min_count < 2:
            raise ConfigError("--min-count must be >= 2")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        for pair in self.pairs:
            if len(pair) != 2 or any(f not in FAMILIES for f in pair):
                raise ConfigError(f"bad family pair {pair!r}; families are {FAMILIES}")
        try:
            FusionConfig(self.lambda_step, self.theta_step)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def provenance(self) -> dict:
        d = asdict(self)
        for key in _UNHASHED:
            d.pop(key)
        d["h"] = list(self.h)
        d["k"] = list(self.k)
        d["pairs"] = ["+".join(p) for p in self.pairs]
        return d

    def hash(self) -> str:
        blob = json.dumps(self.provenance(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")


# -- features ---------------------------------------------------------------

def cmd_features(cfg: RunConfig) -> dict[str, Path]:
    """Extract all feature families for the manifest and write one CSV per family."""
    if not cfg.manifest:
        raise ConfigError("--manifest is required")
    entries = read_manifest(cfg.manifest)
    docs, raws = load_documents(entries, resolve_lexicon(cfg.lexicon))
    policy = resolve_policy(cfg.stopwords, docs)
    settings = ExtractionSettings(tuple(cfg.h), cfg.eta, cfg.shuffles, cfg.seed, cfg.min_count)
    log.info("extracting features for %d documents (%d stopwords)", len(docs), len(policy))
    feats = extract_corpus(docs, raws, policy, settings, cfg.workers)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    h = cfg.hash()
    written = {}
    for fam in FAMILIES:
        cols = family_columns(feats, fam)
        fill = 0.0 if fam == "bg" else None  # an unseen bigram has frequency 0
        rows = []
        for f in feats:
            vals = {f"{fam}_{k}": v for k, v in f.families.get(fam, {}).items()}
            if fill is not None:
                vals = {c: vals.get(c, fill) for c in cols}
            rows.append((f.id, f.label, vals))
        path = out / f"{fam}_features.csv"
        write_feature_csv(path, cols, rows, h)
        written[fam] = path
    _dump_json(out / "provenance.json", {
        "command": "features",
        "version": __version__,
        "config": cfg.provenance(),
        "config_hash": h,
        "documents": [{"id": f.id, "label": f.label, "tokens": f.n_tokens, "network_tokens": f.n_network_tokens}
                      for f in feats],
        "stopword_mode": policy.mode,
        "stopwords": policy.sorted(),
    })
    return written


# -- classify ---------------------------------------------------------------

def family_dataset(table, family: str):
    """Classification attributes of a family: normalized columns for ``net``."""
    cols = table.columns
    if family == "net":
        normed = [c for c in cols if c.endswith("_norm")]
        cols = normed or [c for c in cols if not c.endswith("_eps")]
    return table.dataset(cols).drop_incomplete()


def _load_family(features_dir: Path, family: str):
    path = features_dir / f"{family}_features.csv"
    if not path.exists():
        raise ManifestError(f"{path}: feature file not found")
    return read_feature_csv(path)


def _check_aligned(a, b, name_a: str, name_b: str) -> None:
    if a.ids != b.ids:
        raise ManifestError(f"column 'id' differs between {name_a} and {name_b} feature files")
    if a.labels != b.labels:
        raise ManifestError(f"column 'label' differs between {name_a} and {name_b} feature files")


def cmd_classify(cfg: RunConfig) -> dict[str, Path]:
    """Cross-validate both families of every pair, fuse, and write gain curves and results."""
    if not cfg.features_dir:
        raise ConfigError("--features is required")
    fdir = Path(cfg.features_dir)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fusion = FusionConfig(cfg.lambda_step, cfg.theta_step)
    h = cfg.hash()
    written = {}
    for trad, net in cfg.pairs:
        t_table, r_table = _load_family(fdir, trad), _load_family(fdir, net)
        _check_aligned(t_table, r_table, trad, net)
        t_data, r_data = family_dataset(t_table, trad), family_dataset(r_table, net)
        for fam, data in ((trad, t_data), (net, r_data)):
            if data.X.shape[1] == 0:
                raise ManifestError(f"family {fam!r} has no complete attribute columns")
        if len(t_data.classes) < 2:
            raise ConfigError("classification needs at least 2 classes")
        plan = make_folds(t_data.y, cfg.folds, cfg.seed)
        tag = f"{trad}+{net}"
        record = {
            "command": "classify",
            "version": __version__,
            "config": cfg.provenance(),
            "config_hash": h,
            "features_config_hash": t_table.config_hash,
            "pair": tag,
            "classes": list(t_data.classes),
            "attributes": {trad: list(t_data.feature_names), net: list(r_data.feature_names)},
            "dropped_incomplete": {trad: list(t_data.dropped), net: list(r_data.dropped)},
            "info_gain": {fam: [[n, w] for n, w in rank_attributes(d, cfg.bins)]
                          for fam, d in ((trad, t_data), (net, r_data))},
            "runs": [],
        }
        for k in cfg.k:
            clf = make_classifier(cfg.classifier, k)
            cv_t = cross_validate(t_data, clf, plan)
            cv_r = cross_validate(r_data, clf, plan)
            runs = []
            for f in range(plan.n_folds):
                mt, y = cv_t.fold(f)
                mr, _ = cv_r.fold(f)
                if len(y):
                    runs.append(FoldRun(mt, mr, y))
            entry = {"classifier": cfg.classifier, "k": k, "seed": cfg.seed}
            for fam, cv in ((trad, cv_t), (net, cv_r)):
                entry[fam] = {"feature_family": fam, "fold_accuracies": cv.fold_accuracies, "gamma": cv.accuracy}
            for mode in ("hybrid", "tiebreaker"):
                report = sweep(mode, runs, fusion)
                entry[mode] = report.to_dict()
                path = out / f"gain_{mode}_{tag}_k{k}.csv"
                report.write_csv(path, h)
                written[path.name] = path
            record["runs"].append(entry)
        path = out / f"results_{tag}.json"
        _dump_json(path, record)
        written[path.name] = path
    return written


# -- synth / metrics-dump -----------------------------------------------------

def cmd_synth(cfg: RunConfig) -> Path:
    extra = cfg.extra
    try:
        scfg = SynthConfig(n_classes=extra.get("classes", 2), docs_per_class=extra.get("docs", 40),
                           tokens=extra.get("tokens", 5000), seed=cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    manifest = generate_corpus(scfg, cfg.out)
    _dump_json(Path(cfg.out) / "provenance.json", {
        "command": "synth",
        "version": __version__,
        "config": cfg.provenance(),
        "config_hash": cfg.hash(),
        "synth": asdict(scfg),
    })
    return manifest


def cmd_metrics_dump(cfg: RunConfig) -> list[Path]:
    """Edge list, node table and per-node measurements for each (or one) document."""
    if not cfg.manifest:
        raise ConfigError("--manifest is required")
    entries = read_manifest(cfg.manifest)
    wanted = cfg.extra.get("doc_id")
    if wanted:
        entries = [e for e in entries if e.id == wanted]
        if not entries:
            raise ConfigError(f"document {wanted!r} is not in the manifest")
    docs, _ = load_documents(read_manifest(cfg.manifest), resolve_lexicon(cfg.lexicon))
    policy = resolve_policy(cfg.stopwords, docs)
    keep = {e.id for e in entries}
    h = cfg.hash()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for doc in docs:
        if doc.id not in keep:
            continue
        net = build_adjacency_network(remove_stopwords(doc, policy))
        net.write_edge_list(out / f"{doc.id}_edges.tsv")
        net.write_node_table(out / f"{doc.id}_nodes.tsv")
        table = metrics.node_metric_table(net, cfg.h)
        path = out / f"{doc.id}_node_metrics.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(["lemma", "count", "config_hash", *table]) + "\n")
            for i, lemma in enumerate(net.lemmas):
                vals = ["" if not np.isfinite(v[i]) else repr(float(v[i])) for v in table.values()]
                fh.write(",".join([lemma, str(int(net.counts[i])), h, *vals]) + "\n")
        written += [out / f"{doc.id}_edges.tsv", out / f"{doc.id}_nodes.tsv", path]
    return written


# -- argument parsing ---------------------------------------------------------

def _int_list(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in s.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _pairs(s: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for item in s.split(","):
        parts = item.strip().split("+")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"pair must look like 'int+net', got {item!r}")
        pairs.append((parts[0], parts[1]))
    return tuple(pairs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netstylo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output directory")

    def corpus_args(p):
        p.add_argument("--manifest", required=True, help="CSV with id,path,label columns")
        p.add_argument("--lexicon", default="english",
                       help="'english' (bundled table), 'none', or a surface<TAB>lemma file")
        p.add_argument("--stopwords", default="english",
                       help="'english' (bundled list), 'corpus' (words in every document) or a file path")
        p.add_argument("--h", type=_int_list, default=metrics.DEFAULT_H, help="accessibility levels, e.g. 1,2,3")

    p = sub.add_parser("features", help="extract feature CSVs for a corpus")
    corpus_args(p)
    common(p)
    p.add_argument("--eta", type=int, default=metrics.DEFAULT_ETA)
    p.add_argument("--shuffles", type=int, default=DEFAULT_SHUFFLES)
    p.add_argument("--min-count", type=int, default=DEFAULT_MIN_COUNT)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("classify", help="cross-validate, fuse and report gains")
    p.add_argument("--features", required=True, help="directory written by 'features'")
    common(p)
    p.add_argument("--pairs", type=_pairs, default=RunConfig.pairs,
                   help="traditional+network family pairs, e.g. int+net,stop+net")
    p.add_argument("--classifier", choices=("fknn", "centroid"), default="fknn")
    p.add_argument("--k", type=_int_list, default=(5,))
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--lambda-step", type=float, default=0.01)
    p.add_argument("--theta-step", type=float, default=0.01)
    p.add_argument("--bins", type=int, default=10)

    p = sub.add_parser("synth", help="write a seeded synthetic corpus")
    common(p)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--docs", type=int, default=40, help="documents per class")
    p.add_argument("--tokens", type=int, default=5000)

    p = sub.add_parser("metrics-dump", help="dump networks and per-node measurements")
    corpus_args(p)
    common(p)
    p.add_argument("--doc-id")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(seed=args.seed, out=args.out)
    for name in ("manifest", "lexicon", "stopwords", "h", "eta", "shuffles", "min_count", "workers",
                 "classifier", "k", "folds", "lambda_step", "theta_step", "bins", "pairs"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "features"):
        cfg.features_dir = args.features
    for name in ("classes", "docs", "tokens", "doc_id"):
        if getattr(args, name, None) is not None:
            cfg.extra[name] = getattr(args, name)
    return cfg.validate()


COMMANDS = {"features": cmd_features, "classify": cmd_classify, "synth": cmd_synth,
            "metrics-dump": cmd_metrics_dump}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        COMMANDS[args.command](cfg)
    except (ConfigError, ManifestError, OSError) as exc:
        print(f"netstylo: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - report and map to the runtime exit code
        log.debug("failure", exc_info=True)
        print(f"netstylo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
