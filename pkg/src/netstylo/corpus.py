"""Corpus manifests and feature-matrix CSV files."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .learn import LabeledDataset

META_COLUMNS = ("id", "label", "config_hash")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: Path
    label: str

    def read_bytes(self) -> bytes:
        try:
            return self.path.read_bytes()
        except OSError as exc:
            raise ManifestError(f"{self.path}: {exc.strerror or exc}") from None


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Read an ``id,path,label`` CSV; relative paths resolve against its directory."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{path}: {exc.strerror or exc}") from None
    with fh:
        reader = csv.DictReader(fh)
        missing = {"id", "path", "label"} - set(reader.fieldnames or ())
        if missing:
            raise ManifestError(f"{path}: manifest lacks column(s) {sorted(missing)}")
        entries = []
        seen = set()
        for row in reader:
            doc_id = row["id"].strip()
            if doc_id in seen:
                raise ManifestError(f"{path}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            p = Path(row["path"].strip())
            entries.append(ManifestEntry(doc_id, p if p.is_absolute() else path.parent / p, row["label"].strip()))
    if not entries:
        raise ManifestError(f"{path}: manifest lists no documents")
    return entries


def write_manifest(path: str | Path, entries: Sequence[tuple[str, str, str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "path", "label"])
        w.writerows(entries)


def _fmt(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def write_feature_csv(path: str | Path, columns: Sequence[str], rows: Sequence[tuple[str, str, Mapping[str, float]]],
                      config_hash: str) -> None:
    """One row per document; missing values become empty fields."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*META_COLUMNS, *columns])
        for doc_id, label, values in rows:
            w.writerow([doc_id, label, config_hash, *(_fmt(values.get(c)) for c in columns)])


@dataclass
class FeatureTable:
    ids: list[str]
    labels: list[str]
    columns: list[str]
    X: np.ndarray
    config_hash: str

    def dataset(self, columns: Sequence[str] | None = None) -> LabeledDataset:
        cols = list(columns) if columns is not None else self.columns
        idx = [self.columns.index(c) for c in cols]
        return LabeledDataset(self.X[:, idx], np.asarray(self.labels), tuple(cols), ids=tuple(self.ids))


def read_feature_csv(path: str | Path) -> FeatureTable:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(f"{path}: empty feature file") from None
        for i, col in enumerate(META_COLUMNS):
            if len(header) <= i or header[i] != col:
                raise ManifestError(f"{path}: expected column {col!r} at position {i}")
        ids, labels, hashes, rows = [], [], set(), []
        for line in reader:
            if len(line) != len(header):
                raise ManifestError(f"{path}: row {len(ids) + 2} has {len(line)} fields, header has {len(header)}")
            ids.append(line[0])
            labels.append(line[1])
            hashes.add(line[2])
            rows.append([float(v) if v != "" else np.nan for v in line[3:]])
    columns = header[3:]
    X = np.asarray(rows, dtype=float).reshape(len(rows), len(columns))
    return FeatureTable(ids, labels, columns, X, hashes.pop() if len(hashes) == 1 else "")
