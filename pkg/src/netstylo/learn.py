"""Membership classifiers, information gain and stratified cross-validation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

DEFAULT_FOLDS = 10
DEFAULT_BINS = 10
KNN_XI = 1e-9


@dataclass(frozen=True)
class LabeledDataset:
    """Instances as rows of ``X`` with labels ``y``.

    ``classes`` fixes the column order of every membership matrix computed
    from this dataset; ``dropped`` records attributes removed so far.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    classes: tuple[str, ...] = ()
    ids: tuple[str, ...] = ()
    dropped: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be 2-D")
        y = np.asarray(self.y).astype(str)
        if len(y) != len(X):
            raise ValueError("X and y have different lengths")
        if X.shape[1] != len(self.feature_names):
            raise ValueError("feature_names does not match the number of columns")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if not self.classes:
            object.__setattr__(self, "classes", tuple(sorted(set(y.tolist()))))
        if not self.ids:
            object.__setattr__(self, "ids", tuple(str(i) for i in range(len(y))))

    def __len__(self):
        return len(self.y)

    @property
    def codes(self) -> np.ndarray:
        lookup = {c: j for j, c in enumerate(self.classes)}
        return np.array([lookup[v] for v in self.y], dtype=np.int64)

    def subset(self, rows) -> "LabeledDataset":
        rows = np.asarray(rows)
        return replace(self, X=self.X[rows], y=self.y[rows], ids=tuple(np.asarray(self.ids)[rows]))

    def select(self, columns: Sequence[str]) -> "LabeledDataset":
        idx = [self.feature_names.index(c) for c in columns]
        gone = tuple(c for c in self.feature_names if c not in set(columns))
        return replace(self, X=self.X[:, idx], feature_names=tuple(columns), dropped=self.dropped + gone)

    def drop_incomplete(self) -> "LabeledDataset":
        """Drop every attribute with a missing (non-finite) value on any instance."""
        keep = [c for c, ok in zip(self.feature_names, np.isfinite(self.X).all(axis=0)) if ok]
        return self.select(keep)


# -- preprocessing ----------------------------------------------------------

def standardize(train: LabeledDataset, test: LabeledDataset) -> tuple[LabeledDataset, LabeledDataset]:
    """Scale both sets by the training mean and population deviation.

    Attributes constant on the training set are dropped from both.
    """
    if train.feature_names != test.feature_names:
        raise ValueError("train and test attribute schemas differ")
    mu = train.X.mean(axis=0)
    sd = train.X.std(axis=0)
    keep = sd > 1e-12 * np.maximum(1.0, np.abs(mu))
    names = [c for c, k in zip(train.feature_names, keep) if k]
    gone = tuple(c for c, k in zip(train.feature_names, keep) if not k)

    def apply(ds):
        return replace(ds, X=(ds.X[:, keep] - mu[keep]) / sd[keep],
                       feature_names=tuple(names), dropped=ds.dropped + gone)

    return apply(train), apply(test)


# -- membership classifiers ----------------------------------------------

MembershipClassifier = Callable[[LabeledDataset, np.ndarray], np.ndarray]


def _sq_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return cdist(A, B, "sqeuclidean")


def fuzzy_knn_memberships(train: LabeledDataset, test: np.ndarray, k: int = 5) -> np.ndarray:
    """Distance-weighted vote of the k nearest training instances.

    Each neighbor votes for its class with weight ``1 / (d^2 + 1e-9)``;
    rows are normalized to sum to 1.  Equal distances are resolved by
    training-instance order.
    """
    if len(train) == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= len(train):
        raise ValueError(f"k must lie in [1, {len(train)}], got {k}")
    test = np.atleast_2d(np.asarray(test, dtype=float))
    d2 = _sq_distances(test, train.X)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    w = 1.0 / (np.take_along_axis(d2, nearest, axis=1) + KNN_XI)
    codes = train.codes[nearest]
    m = np.zeros((len(test), len(train.classes)))
    np.add.at(m, (np.arange(len(test))[:, None], codes), w)
    return m / m.sum(axis=1, keepdims=True)


def nearest_centroid_memberships(train: LabeledDataset, test: np.ndarray) -> np.ndarray:
    """Softmax of negative Euclidean distances to the class centroids."""
    codes = train.codes
    missing = [c for j, c in enumerate(train.classes) if not np.any(codes == j)]
    if missing:
        raise ValueError(f"classes without training instances: {missing}")
    centroids = np.stack([train.X[codes == j].mean(axis=0) for j in range(len(train.classes))])
    test = np.atleast_2d(np.asarray(test, dtype=float))
    d = np.sqrt(_sq_distances(test, centroids))
    return softmax(-d, axis=1)


def make_classifier(name: str, k: int = 5) -> MembershipClassifier:
    if name == "fknn":
        return lambda train, test: fuzzy_knn_memberships(train, test, k)
    if name == "centroid":
        return nearest_centroid_memberships
    raise ValueError(f"unknown classifier {name!r}")


def decide(memberships: np.ndarray) -> np.ndarray:
    """Row-wise argmax; the lowest class index wins ties."""
    return np.argmax(memberships, axis=1)


# -- information gain -------------------------------------------------------

def entropy(labels) -> float:
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def discretize(values: np.ndarray, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Equal-width bin index over the observed range of ``values``."""
    v = np.asarray(values, dtype=float)
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros(len(v), dtype=np.int64)
    idx = np.floor((v - lo) / (hi - lo) * bins).astype(np.int64)
    return np.clip(idx, 0, bins - 1)


def info_gain(data: LabeledDataset, attribute: str, bins: int = DEFAULT_BINS) -> float:
    """Entropy of the labels minus their entropy given the binned attribute (bits)."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    col = data.X[:, data.feature_names.index(attribute)]
    binned = discretize(col, bins)
    cond = 0.0
    for b in np.unique(binned):
        mask = binned == b
        cond += mask.sum() / len(binned) * entropy(data.y[mask])
    return max(entropy(data.y) - cond, 0.0) + 0.0  # no negative zero


def rank_attributes(data: LabeledDataset, bins: int = DEFAULT_BINS) -> list[tuple[str, float]]:
    scores = [(name, info_gain(data, name, bins)) for name in data.feature_names]
    return sorted(scores, key=lambda t: (-t[1], t[0]))


# -- cross-validation -------------------------------------------------------

@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    assignment: np.ndarray
    seed: int

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)


def make_folds(labels, n_folds: int = DEFAULT_FOLDS, seed: int = 0) -> FoldPlan:
    """Stratified fold assignment.

    Each class is shuffled and dealt round-robin, continuing from where the
    previous class stopped, so per-class and total fold sizes differ by at
    most one.
    """
    labels = np.asarray(labels).astype(str)
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    if n_folds > len(labels):
        raise ValueError(f"{n_folds} folds for {len(labels)} instances")
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for cls in sorted(set(labels.tolist())):
        rows = rng.permutation(np.flatnonzero(labels == cls))
        if len(rows) < n_folds:
            warnings.warn(f"class {cls!r} has {len(rows)} instances for {n_folds} folds; "
                          "some folds will lack it", stacklevel=2)
        assignment[rows] = (offset + np.arange(len(rows))) % n_folds
        offset = (offset + len(rows)) % n_folds
    return FoldPlan(n_folds, assignment, seed)


@dataclass
class CVResult:
    """Cross-validated memberships, one row per instance in dataset order."""

    memberships: np.ndarray
    truth: np.ndarray
    folds: FoldPlan
    fold_accuracies: list[float] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return float(np.mean(decide(self.memberships) == self.truth))

    def fold(self, f: int) -> tuple[np.ndarray, np.ndarray]:
        rows = self.folds.test_rows(f)
        return self.memberships[rows], self.truth[rows]


def cross_validate(data: LabeledDataset, classifier: MembershipClassifier, plan: FoldPlan) -> CVResult:
    """Train on each fold's complement and collect the fold's memberships.

    Features are standardized with training-fold statistics inside each fold.
    """
    if len(data.classes) < 2:
        raise ValueError("classification needs at least 2 classes")
    if len(plan.assignment) != len(data):
        raise ValueError("fold plan does not match the dataset size")
    truth = data.codes
    m = np.zeros((len(data), len(data.classes)))
    accs = []
    for f in range(plan.n_folds):
        test_rows = plan.test_rows(f)
        if len(test_rows) == 0:
            continue
        train, test = standardize(data.subset(plan.train_rows(f)), data.subset(test_rows))
        m[test_rows] = classifier(train, test.X)
        accs.append(float(np.mean(decide(m[test_rows]) == truth[test_rows])))
    return CVResult(m, truth, plan, accs)
