"""Accuracy metrics, harmonic mean and regression diagnostics."""

from __future__ import annotations

import enum
from fractions import Fraction

import numpy as np

from .exceptions import EmptyClass, EmptyInput, ShapeMismatch


class AccuracyKind(str, enum.Enum):
    PER_SAMPLE = "per-sample"
    PER_CLASS = "per-class"


def _pair(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ShapeMismatch(f"pred {pred.shape} and truth {truth.shape} differ")
    if truth.size == 0:
        raise EmptyInput("accuracy of an empty set")
    return pred, truth


def per_sample_accuracy(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return 100.0 * (np.count_nonzero(pred == truth) / truth.size)


def per_class_accuracy(pred, truth, classes=None) -> float:
    """Mean over ``classes`` of the within-class accuracy, in percent.

    ``classes`` defaults to the classes present in ``truth``. The mean is
    accumulated exactly and rounded once, so balanced inputs give the
    per-sample value bit for bit.
    """
    pred, truth = _pair(pred, truth)
    classes = np.unique(truth) if classes is None else np.asarray(classes)
    if classes.size == 0:
        raise EmptyInput("no classes to average over")
    total = Fraction(0)
    for c in classes:
        mask = truth == c
        count = int(mask.sum())
        if count == 0:
            raise EmptyClass(int(c))
        total += Fraction(int(np.count_nonzero(pred[mask] == c)), count)
    return 100.0 * float(total / classes.size)


def accuracy(pred, truth, kind=AccuracyKind.PER_CLASS, classes=None) -> float:
    if AccuracyKind(kind) is AccuracyKind.PER_SAMPLE:
        return per_sample_accuracy(pred, truth)
    return per_class_accuracy(pred, truth, classes)


def harmonic_mean(a_u: float, a_s: float) -> float:
    """``2 a_u a_s / (a_u + a_s)``, defined as 0 when both are 0."""
    if a_u + a_s == 0:
        return 0.0
    return 2.0 * a_u * a_s / (a_u + a_s)


def attribute_mse(predicted, target) -> float:
    """Squared error averaged over samples and attributes."""
    predicted = np.asarray(predicted, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if predicted.shape != target.shape:
        raise ShapeMismatch(f"{predicted.shape} vs {target.shape}")
    if predicted.size == 0:
        raise EmptyInput("attribute_mse of an empty matrix")
    return float(np.mean((predicted - target) ** 2))


def mse_vs_lambda_curves(d, split, grid):
    """Attribute MSE of a visual-to-semantic ridge fit for each ``lam`` in ``grid``.

    The model is fit on the split's training pool; returns ``(seen, unseen)``
    arrays measured on the seen-test samples of training classes and on the
    unseen-test pool.
    """
    from .models import build_target_matrix, fit_linear_vs

    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise EmptyInput("lambda grid is empty")
    X_tr, _ = d.subset(split.train_idx)
    T_tr = build_target_matrix(d, split.train_idx)
    # only seen-test samples of classes the fit actually saw
    seen_idx = split.seen_test_idx[np.isin(d.labels[split.seen_test_idx], split.partition.train_classes)]
    X_s, _ = d.subset(seen_idx)
    X_u, _ = d.subset(split.unseen_test_idx)
    T_s = build_target_matrix(d, seen_idx)
    T_u = build_target_matrix(d, split.unseen_test_idx)
    seen, unseen = [], []
    for lam in grid:
        W = fit_linear_vs(X_tr, T_tr, lam)
        seen.append(attribute_mse(X_s @ W.T, T_s))
        unseen.append(attribute_mse(X_u @ W.T, T_u))
    return np.array(seen), np.array(unseen)


def class_variances(X, y):
    """Intra-class and inter-class variance of a labelled feature matrix.

    ``intra`` is the mean squared distance of samples to their class
    centroid; ``inter`` the mean squared distance of class centroids to the
    mean centroid, each class weighted equally.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] != y.size:
        raise ShapeMismatch(f"{y.size} labels for {X.shape[0]} rows")
    if y.size == 0:
        raise EmptyInput("no samples")
    classes, inverse = np.unique(y, return_inverse=True)
    counts = np.bincount(inverse)
    centroids = np.zeros((classes.size, X.shape[1]))
    np.add.at(centroids, inverse, X)
    centroids /= counts[:, None]
    intra = float(np.mean(((X - centroids[inverse]) ** 2).sum(1)))
    inter = float(np.mean(((centroids - centroids.mean(0)) ** 2).sum(1)))
    return intra, inter
