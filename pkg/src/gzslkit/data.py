"""Core value types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    EmptyDataset,
    LabelCountMismatch,
    LabelOutOfRange,
    NonFiniteValue,
    ShapeMismatch,
    ZeroPrototype,
)


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


def _first_nonfinite(a):
    bad = np.argwhere(~np.isfinite(a))
    return tuple(int(i) for i in bad[0]) if len(bad) else None


def validate_dataset(d: "Dataset") -> None:
    """Raise the matching :mod:`gzslkit.exceptions` error if ``d`` is invalid."""
    X, y, S = d.features, d.labels, d.prototypes
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise EmptyDataset(f"features must be a non-empty 2-d matrix, got shape {X.shape}")
    if S.ndim != 2 or S.shape[1] < 1:
        raise EmptyDataset(f"prototypes must be a 2-d matrix with K >= 1, got shape {S.shape}")
    if S.shape[0] < 2:
        raise EmptyDataset(f"need at least 2 classes, got {S.shape[0]}")
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise LabelCountMismatch(y.size, X.shape[0])
    n_classes = S.shape[0]
    out = np.flatnonzero((y < 0) | (y >= n_classes))
    if out.size:
        raise LabelOutOfRange(int(out[0]), int(y[out[0]]), n_classes)
    for name, a in (("features", X), ("prototypes", S)):
        where = _first_nonfinite(a)
        if where is not None:
            raise NonFiniteValue(name, where)


def normalize_prototypes(prototypes):
    """Scale every prototype row to unit Euclidean norm."""
    S = np.asarray(prototypes, dtype=np.float64)
    norms = np.linalg.norm(S, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroPrototype(int(zero[0]))
    return S / norms[:, None]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Visual features, integer labels in ``[0, C)`` and a ``C x K`` prototype matrix.

    Arrays are copied and made read-only; the instance is validated on
    construction.
    """

    features: np.ndarray
    labels: np.ndarray
    prototypes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen(np.atleast_2d(self.features), np.float64))
        labels = np.asarray(self.labels)
        if labels.size and not np.all(np.equal(np.mod(labels, 1), 0)):
            raise LabelOutOfRange(int(np.flatnonzero(np.mod(labels, 1))[0]), "non-integer", -1)
        object.__setattr__(self, "labels", _frozen(labels, np.int64))
        object.__setattr__(self, "prototypes", _frozen(np.atleast_2d(self.prototypes), np.float64))
        validate_dataset(self)

    @property
    def class_count(self) -> int:
        return self.prototypes.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    def subset(self, idx):
        """Features and labels of the given sample indices."""
        idx = np.asarray(idx, dtype=np.int64)
        return self.features[idx], self.labels[idx]

    def class_indices(self, c):
        return np.flatnonzero(self.labels == c)


def _as_class_set(values):
    return _frozen(np.unique(np.asarray(values, dtype=np.int64)), np.int64)


@dataclass(frozen=True, eq=False)
class ClassPartition:
    train_classes: np.ndarray
    val_classes: np.ndarray
    test_classes: np.ndarray

    def __post_init__(self):
        for name in ("train_classes", "val_classes", "test_classes"):
            object.__setattr__(self, name, _as_class_set(getattr(self, name)))

    def check(self, n_classes):
        sets = [self.train_classes, self.val_classes, self.test_classes]
        if any(s.size == 0 for s in sets):
            raise ShapeMismatch("every class set of a partition must be nonempty")
        joined = np.concatenate(sets)
        if np.unique(joined).size != joined.size:
            raise ShapeMismatch("class sets of a partition must be pairwise disjoint")
        if joined.min() < 0 or joined.max() >= n_classes:
            raise ShapeMismatch(f"partition refers to classes outside [0, {n_classes})")

    def __eq__(self, other):
        if not isinstance(other, ClassPartition):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, n), getattr(other, n))
            for n in ("train_classes", "val_classes", "test_classes")
        )


POOLS = ("train_idx", "seen_val_idx", "seen_test_idx", "unseen_val_idx", "unseen_test_idx")


@dataclass(frozen=True, eq=False)
class GzslSplit:
    """Class partition plus the five per-sample pools of a GZSL split."""

    partition: ClassPartition
    train_idx: np.ndarray
    seen_val_idx: np.ndarray
    seen_test_idx: np.ndarray
    unseen_val_idx: np.ndarray
    unseen_test_idx: np.ndarray

    def __post_init__(self):
        for name in POOLS:
            object.__setattr__(self, name, _frozen(np.sort(np.asarray(getattr(self, name), dtype=np.int64)), np.int64))

    @property
    def seen_classes(self):
        """Classes available at final training time (train and validation)."""
        p = self.partition
        return np.union1d(p.train_classes, p.val_classes)

    @property
    def all_classes(self):
        p = self.partition
        return np.union1d(self.seen_classes, p.test_classes)

    def check(self, d: Dataset) -> None:
        """Raise ``ShapeMismatch`` unless disjointness and label membership hold."""
        p = self.partition
        p.check(d.class_count)
        joined = np.concatenate([getattr(self, n) for n in POOLS])
        if joined.size and (joined.min() < 0 or joined.max() >= d.n_samples):
            raise ShapeMismatch("split indices out of range")
        if np.unique(joined).size != joined.size:
            raise ShapeMismatch("split index pools overlap")
        allowed = {
            "train_idx": p.train_classes,
            "seen_val_idx": p.train_classes,
            "seen_test_idx": self.seen_classes,
            "unseen_val_idx": p.val_classes,
            "unseen_test_idx": p.test_classes,
        }
        for name, classes in allowed.items():
            labels = d.labels[getattr(self, name)]
            if not np.isin(labels, classes).all():
                raise ShapeMismatch(f"{name} contains labels outside its class set")

    def __eq__(self, other):
        if not isinstance(other, GzslSplit):
            return NotImplemented
        return self.partition == other.partition and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in POOLS
        )


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Similarity scores of ``M`` samples against ordered candidate classes."""

    scores: np.ndarray
    candidate_classes: np.ndarray
    seen_mask: np.ndarray

    def __post_init__(self):
        scores = _frozen(np.atleast_2d(self.scores), np.float64)
        classes = _frozen(self.candidate_classes, np.int64)
        mask = _frozen(self.seen_mask, bool)
        if classes.ndim != 1 or scores.shape[1] != classes.size:
            raise ShapeMismatch(f"{scores.shape[1]} score columns for {classes.size} candidate classes")
        if mask.shape != classes.shape:
            raise ShapeMismatch("seen_mask length must equal the number of candidate classes")
        if np.unique(classes).size != classes.size:
            raise ShapeMismatch("candidate classes must be distinct")
        where = _first_nonfinite(scores)
        if where is not None:
            raise NonFiniteValue("scores", where)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "candidate_classes", classes)
        object.__setattr__(self, "seen_mask", mask)

    @classmethod
    def from_classes(cls, scores, candidate_classes, seen_classes):
        candidate_classes = np.asarray(candidate_classes, dtype=np.int64)
        return cls(scores, candidate_classes, np.isin(candidate_classes, seen_classes))

    @property
    def seen_classes(self):
        return self.candidate_classes[self.seen_mask]

    @property
    def unseen_classes(self):
        return self.candidate_classes[~self.seen_mask]

    def rows(self, which):
        return ScoreMatrix(self.scores[which], self.candidate_classes, self.seen_mask)


@dataclass(frozen=True)
class RunResult:
    """Test-time GZSL numbers from one seeded run.

    Accuracies are percentages and ``ausuc`` lies in ``[0, 1]``.
    ``acc_unseen_in_unseen`` and ``acc_seen_in_seen`` come from the same
    fitted model with candidates restricted to each population.
    """

    acc_unseen_in_all: float
    acc_seen_in_all: float
    harmonic_mean: float
    ausuc: float
    gamma_star: float
    lambda_star: float
    seed: int
    acc_unseen_in_unseen: float = float("nan")
    acc_seen_in_seen: float = float("nan")

    def __post_init__(self):
        for name in ("acc_unseen_in_all", "acc_seen_in_all", "harmonic_mean"):
            v = getattr(self, name)
            if not 0.0 <= v <= 100.0:
                raise ValueError(f"{name}={v} outside [0, 100]")
        if not 0.0 <= self.ausuc <= 1.0:
            raise ValueError(f"ausuc={self.ausuc} outside [0, 1]")
        a, b = self.acc_unseen_in_all, self.acc_seen_in_all
        expected = 0.0 if a + b == 0 else 2 * a * b / (a + b)
        if abs(expected - self.harmonic_mean) > 1e-9:
            raise ValueError("harmonic_mean inconsistent with its components")


def _mean_std(values):
    values = np.asarray(values, dtype=np.float64)
    return float(values.mean()), float(values.std())


@dataclass(frozen=True)
class GzslReport:
    """Outcome of a GZSL evaluation, one :class:`RunResult` per run.

    Summary properties average over runs; ``*_std`` give the population
    standard deviation, which is exactly 0 for deterministic scorers.
    """

    runs: tuple
    seed: int
    grid: tuple
    config: dict = field(default_factory=dict)

    def _stat(self, name):
        return _mean_std([getattr(r, name) for r in self.runs])

    acc_unseen_in_all = property(lambda self: self._stat("acc_unseen_in_all")[0])
    acc_seen_in_all = property(lambda self: self._stat("acc_seen_in_all")[0])
    harmonic_mean = property(lambda self: self._stat("harmonic_mean")[0])
    harmonic_mean_std = property(lambda self: self._stat("harmonic_mean")[1])
    ausuc = property(lambda self: self._stat("ausuc")[0])
    ausuc_std = property(lambda self: self._stat("ausuc")[1])
    gamma_star = property(lambda self: self._stat("gamma_star")[0])
    lambda_star = property(lambda self: self._stat("lambda_star")[0])


@dataclass(frozen=True)
class ZslReport:
    """Per-run ZSL accuracy among unseen classes."""

    accuracies: tuple
    lambda_stars: tuple
    seed: int
    grid: tuple
    config: dict = field(default_factory=dict)

    @property
    def accuracy(self):
        return _mean_std(self.accuracies)[0]

    @property
    def accuracy_std(self):
        return _mean_std(self.accuracies)[1]

    @property
    def lambda_star(self):
        return self.lambda_stars[0]
