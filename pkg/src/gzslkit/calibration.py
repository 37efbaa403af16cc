"""Calibrated argmax over seen and unseen classes.

Subtracting ``gamma`` from every seen-class score only changes a row's
prediction when ``gamma`` crosses that row's gap ``max_seen - max_unseen``:
below it the row keeps its best seen class, above it the row switches to its
best unseen class. Accuracies are therefore piecewise constant in ``gamma``
and an exact sweep only needs one probe per interval between gaps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_is_fitted

from .data import ScoreMatrix
from .exceptions import EmptyInput, NoSeenClass, NoUnseenClass, ShapeMismatch
from .metrics import AccuracyKind, accuracy, harmonic_mean

_NO_CLASS = np.iinfo(np.int64).max


@dataclass(frozen=True)
class TradeoffPoint:
    gamma: float
    acc_unseen_in_all: float
    acc_seen_in_all: float


def _argmax_lowest_id(scores, classes):
    best = scores.max(axis=1, keepdims=True)
    return np.where(scores == best, classes[None, :], _NO_CLASS).min(axis=1)


def predict(sm: ScoreMatrix) -> np.ndarray:
    """Highest-scoring candidate class per row; exact ties go to the lowest class id."""
    if sm.candidate_classes.size == 0:
        raise EmptyInput("no candidate classes")
    return _argmax_lowest_id(sm.scores, sm.candidate_classes)


def calibrate_scores(sm: ScoreMatrix, gamma: float) -> ScoreMatrix:
    """Subtract ``gamma`` from every seen-class column."""
    return ScoreMatrix(sm.scores - gamma * sm.seen_mask, sm.candidate_classes, sm.seen_mask)


def _split_columns(sm):
    if not sm.seen_mask.any():
        raise NoSeenClass("score matrix has no seen candidate class")
    if sm.seen_mask.all():
        raise NoUnseenClass("score matrix has no unseen candidate class")
    seen, unseen = sm.scores[:, sm.seen_mask], sm.scores[:, ~sm.seen_mask]
    return seen, unseen


def row_gaps(sm: ScoreMatrix) -> np.ndarray:
    """Per row, ``max seen score - max unseen score``: the gamma at which it switches side."""
    seen, unseen = _split_columns(sm)
    return seen.max(axis=1) - unseen.max(axis=1)


def gamma_breakpoints(sm: ScoreMatrix) -> np.ndarray:
    """Sorted distinct switching points of the calibrated prediction."""
    return np.unique(row_gaps(sm))


def probe_gammas(breakpoints) -> np.ndarray:
    """One gamma inside every interval cut out by ``breakpoints``, outer rays included."""
    b = np.asarray(breakpoints, dtype=np.float64)
    if b.size == 0:
        return np.zeros(1)
    spread = (b[-1] - b[0]) / (b.size - 1) if b.size > 1 else 1.0
    pad = max(spread, 1e-9 * float(np.abs(b).max()), 1e-12)
    inner = (b[:-1] + b[1:]) / 2.0
    return np.concatenate([[b[0] - pad], inner, [b[-1] + pad]])


class _Sweep:
    """Accuracies of both populations at arbitrary gammas, vectorised over rows."""

    def __init__(self, sm: ScoreMatrix, truth, kind):
        truth = np.asarray(truth, dtype=np.int64)
        if truth.shape != (sm.scores.shape[0],):
            raise ShapeMismatch(f"{truth.size} labels for {sm.scores.shape[0]} score rows")
        seen_cols, unseen_cols = _split_columns(sm)
        seen_ids = sm.candidate_classes[sm.seen_mask]
        unseen_ids = sm.candidate_classes[~sm.seen_mask]

        is_seen = np.isin(truth, seen_ids)
        is_unseen = np.isin(truth, unseen_ids)
        if not (is_seen | is_unseen).all():
            raise ShapeMismatch("every truth label must be a candidate class")
        if not is_seen.any():
            raise NoSeenClass("no sample of a seen class among the truth labels")
        if not is_unseen.any():
            raise NoUnseenClass("no sample of an unseen class among the truth labels")

        seen_win = _argmax_lowest_id(seen_cols, seen_ids)
        unseen_win = _argmax_lowest_id(unseen_cols, unseen_ids)
        gap = seen_cols.max(axis=1) - unseen_cols.max(axis=1)

        kind = AccuracyKind(kind)
        w_u = self._weights(truth, is_unseen, kind)
        w_s = self._weights(truth, is_seen, kind)
        gain_u = w_u * (is_unseen & (unseen_win == truth))
        gain_s = w_s * (is_seen & (seen_win == truth))

        order = np.argsort(gap, kind="stable")
        self.gaps = gap[order]
        self.cum_u = np.concatenate([[0.0], np.cumsum(gain_u[order])])
        self.cum_s = np.concatenate([[0.0], np.cumsum(gain_s[order])])

    @staticmethod
    def _weights(truth, mask, kind):
        w = np.zeros(truth.size)
        if kind is AccuracyKind.PER_SAMPLE:
            w[mask] = 1.0 / mask.sum()
        else:
            classes, counts = np.unique(truth[mask], return_counts=True)
            per = dict(zip(classes.tolist(), (1.0 / (counts * classes.size)).tolist()))
            w[mask] = [per[c] for c in truth[mask].tolist()]
        return w

    def at(self, gammas):
        """``(A_U->C, A_S->C)`` in percent; ``gammas`` must avoid the gaps themselves."""
        gammas = np.asarray(gammas, dtype=np.float64)
        below = np.searchsorted(self.gaps, gammas, side="left")
        not_above = np.searchsorted(self.gaps, gammas, side="right")
        acc_u = 100.0 * self.cum_u[below]
        acc_s = 100.0 * (self.cum_s[-1] - self.cum_s[not_above])
        return np.clip(acc_u, 0.0, 100.0), np.clip(acc_s, 0.0, 100.0)


def accuracies_at(sm: ScoreMatrix, truth, gamma, kind=AccuracyKind.PER_CLASS):
    """``(A_U->C, A_S->C)`` at one gamma by explicit calibration and argmax."""
    truth = np.asarray(truth, dtype=np.int64)
    pred = predict(calibrate_scores(sm, gamma))
    unseen = np.isin(truth, sm.unseen_classes)
    seen = np.isin(truth, sm.seen_classes)
    return (
        accuracy(pred[unseen], truth[unseen], kind),
        accuracy(pred[seen], truth[seen], kind),
    )


def tradeoff_curve(sm: ScoreMatrix, truth, kind=AccuracyKind.PER_SAMPLE) -> list[TradeoffPoint]:
    """Every distinct (A_U->C, A_S->C) operating point, ordered by increasing gamma."""
    sweep = _Sweep(sm, truth, kind)
    gammas = probe_gammas(np.unique(sweep.gaps))
    acc_u, acc_s = sweep.at(gammas)
    return [TradeoffPoint(float(g), float(u), float(s)) for g, u, s in zip(gammas, acc_u, acc_s)]


def select_gamma(sm: ScoreMatrix, truth, kind=AccuracyKind.PER_CLASS):
    """Gamma maximising the harmonic mean of A_U->C and A_S->C, and that maximum.

    The sweep is exact: H is constant between consecutive breakpoints and
    every interval is probed once. Ties go to the smallest gamma.
    """
    sweep = _Sweep(sm, truth, kind)
    gammas = probe_gammas(np.unique(sweep.gaps))
    acc_u, acc_s = sweep.at(gammas)
    h = np.array([harmonic_mean(u, s) for u, s in zip(acc_u, acc_s)])
    best = int(np.argmax(h))
    return float(gammas[best]), float(h[best])


def ausuc(sm: ScoreMatrix, truth, kind=AccuracyKind.PER_SAMPLE) -> float:
    """Area under A_S->C versus A_U->C as gamma sweeps the real line, in ``[0, 1]``."""
    points = tradeoff_curve(sm, truth, kind)
    u = np.array([p.acc_unseen_in_all for p in points]) / 100.0
    s = np.array([p.acc_seen_in_all for p in points]) / 100.0
    order = np.lexsort((-s, u))
    area = float(np.trapezoid(s[order], u[order]))
    return min(max(area, 0.0), 1.0)


class CalibratedClassifier(BaseEstimator):
    """GZSL classifier: a prototype scorer plus a seen-class penalty.

    ``fit`` trains the wrapped scorer and records the seen classes;
    ``fit_gamma`` picks the penalty on held-out samples of seen and unseen
    classes. ``gamma`` fixes the penalty up front when given.

    Parameters
    ----------
    estimator : PrototypeScorer
    gamma : float or None
    accuracy : {"per-class", "per-sample"}
    """

    def __init__(self, estimator, gamma=None, accuracy="per-class"):
        self.estimator = estimator
        self.gamma = gamma
        self.accuracy = accuracy

    def fit(self, X, y, prototypes):
        self.estimator_ = clone(self.estimator).fit(X, y, prototypes)
        self.seen_classes_ = np.unique(np.asarray(y, dtype=np.int64))
        self.gamma_ = 0.0 if self.gamma is None else float(self.gamma)
        return self

    def score_matrix(self, X, prototypes, candidate_classes=None):
        check_is_fitted(self, "estimator_")
        if candidate_classes is None:
            candidate_classes = np.arange(np.asarray(prototypes).shape[0])
        return self.estimator_.score_matrix(X, prototypes, candidate_classes, self.seen_classes_)

    def fit_gamma(self, X, y, prototypes, candidate_classes=None):
        sm = self.score_matrix(X, prototypes, candidate_classes)
        self.gamma_, self.validation_harmonic_mean_ = select_gamma(sm, y, self.accuracy)
        return self

    def decision_function(self, X, prototypes, candidate_classes=None):
        return calibrate_scores(self.score_matrix(X, prototypes, candidate_classes), self.gamma_).scores

    def predict(self, X, prototypes, candidate_classes=None):
        sm = self.score_matrix(X, prototypes, candidate_classes)
        return predict(calibrate_scores(sm, self.gamma_))
