"""Reference ZSL scorers.

Two closed-form ridge embeddings and the bilinear hinge-rank family, each
learning a ``K x D`` matrix ``W``. The function-level API works on raw
arrays; the estimator classes wrap it with the scikit-learn conventions
(``get_params``/``set_params``, ``fit`` returning ``self``, fitted
attributes with a trailing underscore) so they can be cloned over a grid.

All estimators take the prototype matrix as an extra argument: ``fit(X, y,
prototypes)`` where ``y`` indexes rows of ``prototypes``, and
``decision_function(X, prototypes)`` scores against every row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .data import Dataset, ScoreMatrix
from .exceptions import DivergedLoss, ShapeMismatch, SingularSystem

VARIANTS = ("ale", "devise", "sje")


def build_target_matrix(d: Dataset, idx) -> np.ndarray:
    """Row ``n`` is the prototype of the label of sample ``idx[n]``."""
    idx = np.asarray(idx, dtype=np.int64)
    return d.prototypes[d.labels[idx]]


def _spd_solve(A, B, unregularized):
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularSystem("normal equations are not positive definite; use lambda > 0") from exc
    # cho_factor accepts nearly singular matrices; refuse an ill-posed solve
    if unregularized and np.linalg.cond(A) > 1e14:
        raise SingularSystem("normal equations are numerically singular; use lambda > 0")
    return linalg.cho_solve(factor, B, check_finite=False)


def _check_xt(X, T, lam):
    X = np.asarray(X, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if X.ndim != 2 or T.ndim != 2 or X.shape[0] != T.shape[0]:
        raise ShapeMismatch(f"X {X.shape} and T {T.shape} must have the same number of rows")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return X, T


def fit_linear_vs(X, T, lam: float) -> np.ndarray:
    """Ridge map from visual to semantic space.

    Minimises ``||X W^T - T||_F^2 / N + lam ||W||_F^2`` whose solution is
    ``W = T^T X (X^T X + lam N I_D)^{-1}``.
    """
    X, T = _check_xt(X, T, lam)
    n, dim = X.shape
    A = X.T @ X + lam * n * np.eye(dim)
    return _spd_solve(A, X.T @ T, lam == 0).T


def fit_linear_sv(X, T, lam: float) -> np.ndarray:
    """Ridge map from semantic to visual space.

    Minimises ``||X - T W||_F^2 / N + lam ||W||_F^2`` whose solution is
    ``W = (T^T T + lam N I_K)^{-1} T^T X``.
    """
    X, T = _check_xt(X, T, lam)
    n, k = T.shape
    A = T.T @ T + lam * n * np.eye(k)
    return _spd_solve(A, T.T @ X, lam == 0)


def _sq_dists(P, Q):
    # ||p - q||^2 for all pairs, clipped at 0 against cancellation
    d = (P * P).sum(1)[:, None] - 2.0 * P @ Q.T + (Q * Q).sum(1)[None, :]
    return np.maximum(d, 0.0)


def score_linear_vs(W, X, S) -> np.ndarray:
    """``-||W x_m - s_c||^2``: similarity in semantic space, shape ``M x C``."""
    return -_sq_dists(np.asarray(X) @ np.asarray(W).T, np.asarray(S))


def score_linear_sv(W, X, S) -> np.ndarray:
    """``-||x_m - s_c^T W||^2``: similarity in visual space, shape ``M x C``."""
    return -_sq_dists(np.asarray(X, dtype=np.float64), np.asarray(S) @ np.asarray(W))


def score_bilinear(W, X, S) -> np.ndarray:
    """``s_c^T W x_m``, shape ``M x C``."""
    return np.asarray(X) @ np.asarray(W).T @ np.asarray(S).T


def ale_weight(r: int) -> float:
    """Rank weight ``(1 + 1/2 + ... + 1/r) / r``, zero for ``r = 0``."""
    if r <= 0:
        return 0.0
    return float(np.sum(1.0 / np.arange(1, r + 1)) / r)


def hinge_rank_loss_and_grad(W, x, y, S, margin, variant):
    """Per-sample hinge-rank loss and its gradient with respect to ``W``.

    ``S`` holds the candidate prototypes and ``y`` is the row of the true
    class. Per rival ``c``, ``l_c = max(0, margin + s_c^T W x - s_y^T W x)``;
    DeViSE sums them, SJE keeps the largest, ALE scales the sum by
    :func:`ale_weight` of the number of violating rivals.
    """
    variant = variant.lower()
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    S = np.asarray(S, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    f = S @ (W @ x)
    viol = margin + f - f[y]
    viol[y] = -np.inf
    losses = np.maximum(viol, 0.0)
    active = viol > 0

    coef = np.zeros(S.shape[0])
    if variant == "devise":
        coef[active] = 1.0
        loss = losses.sum()
    elif variant == "sje":
        c = int(np.argmax(viol))
        loss = losses[c]
        if active[c]:
            coef[c] = 1.0
    else:
        beta = ale_weight(int(active.sum()))
        coef[active] = beta
        loss = beta * losses.sum()

    direction = coef @ S - coef.sum() * S[y]
    return float(loss), np.outer(direction, x)


def hinge_rank_loss(W, x, y, S, margin, variant) -> float:
    return hinge_rank_loss_and_grad(W, x, y, S, margin, variant)[0]


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float = 0.01
    epochs: int = 10
    margin_fraction: float = 0.1
    init_scale: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.margin_fraction <= 0:
            raise ValueError("learning_rate and margin_fraction must be > 0")
        if self.epochs < 0 or self.init_scale < 0:
            raise ValueError("epochs and init_scale must be >= 0")


def _sgd_bilinear(X, y_rows, S, lam, variant, sgd: SgdConfig):
    """SGD on ``sum_n loss_n / N + lam ||W||_F^2``.

    The ridge term is applied as an implicit (proximal) step, which keeps
    the update stable for any ``lam`` with a constant learning rate.
    """
    rng = np.random.default_rng(sgd.seed)
    n, dim = X.shape
    k = S.shape[1]
    W = rng.uniform(-sgd.init_scale, sgd.init_scale, size=(k, dim))

    pair_n = rng.integers(n, size=256)
    pair_c = rng.integers(S.shape[0], size=256)
    f0 = np.einsum("ij,ij->i", S[pair_c] @ W, X[pair_n])
    margin = sgd.margin_fraction * float(np.mean(np.abs(f0)))

    shrink = 1.0 / (1.0 + 2.0 * sgd.learning_rate * lam)
    for _ in range(sgd.epochs):
        for i in rng.permutation(n):
            loss, grad = hinge_rank_loss_and_grad(W, X[i], y_rows[i], S, margin, variant)
            if not np.isfinite(loss):
                raise DivergedLoss(f"non-finite loss at sample {i}")
            W = (W - sgd.learning_rate * grad) * shrink
    if not np.all(np.isfinite(W)):
        raise DivergedLoss("weights became non-finite")
    return W, margin


@dataclass(frozen=True)
class ModelSpec:
    """Scorer family, its regularisation weight and, for ranking models, SGD settings."""

    family: str = "linear_vs"
    lam: float = 1.0
    variant: str | None = None
    sgd: SgdConfig = field(default_factory=SgdConfig)

    FAMILIES = ("linear_vs", "linear_sv", "bilinear")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if (self.variant is not None) != (self.family == "bilinear"):
            raise ValueError("variant must be given exactly for the bilinear family")
        if self.variant is not None and self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def seeded(self) -> bool:
        return self.family == "bilinear"

    def estimator(self):
        if self.family == "linear_vs":
            return LinearVS(alpha=self.lam)
        if self.family == "linear_sv":
            return LinearSV(alpha=self.lam)
        s = self.sgd
        return BilinearRanking(
            variant=self.variant,
            alpha=self.lam,
            learning_rate=s.learning_rate,
            epochs=s.epochs,
            margin_fraction=s.margin_fraction,
            init_scale=s.init_scale,
            random_state=s.seed,
        )


@dataclass(frozen=True)
class FitResult:
    weights: np.ndarray
    spec: ModelSpec
    target_matrix_rows: int


def fit_bilinear_ranking(d: Dataset, idx, spec: ModelSpec) -> FitResult:
    """Fit a ranking model on samples ``idx`` with their own classes as rivals."""
    if spec.family != "bilinear":
        raise ValueError("fit_bilinear_ranking needs a bilinear ModelSpec")
    idx = np.asarray(idx, dtype=np.int64)
    est = spec.estimator().fit(d.features[idx], d.labels[idx], d.prototypes)
    return FitResult(est.coef_, spec, idx.size)


class PrototypeScorer(BaseEstimator):
    """Shared prediction surface of the embedding scorers."""

    deterministic = True

    def _validate_fit_input(self, X, y, prototypes):
        X = check_array(X, dtype=np.float64)
        prototypes = check_array(prototypes, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (X.shape[0],):
            raise ShapeMismatch(f"{y.size} labels for {X.shape[0]} samples")
        if y.size and (y.min() < 0 or y.max() >= prototypes.shape[0]):
            raise ShapeMismatch("labels must index rows of prototypes")
        self.n_features_in_ = X.shape[1]
        return X, y, prototypes

    def _raw_scores(self, X, S):
        raise NotImplementedError

    def decision_function(self, X, prototypes):
        """Scores of every sample against every prototype row, ``M x C``."""
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ShapeMismatch(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self._raw_scores(X, check_array(prototypes, dtype=np.float64))

    def score_matrix(self, X, prototypes, candidate_classes, seen_classes=()):
        candidate_classes = np.asarray(candidate_classes, dtype=np.int64)
        scores = self.decision_function(X, np.asarray(prototypes)[candidate_classes])
        return ScoreMatrix.from_classes(scores, candidate_classes, seen_classes)

    def predict(self, X, prototypes, candidate_classes=None):
        """Most similar candidate class per sample, ties to the lowest class id."""
        from .calibration import predict

        if candidate_classes is None:
            candidate_classes = np.arange(np.asarray(prototypes).shape[0])
        return predict(self.score_matrix(X, prototypes, candidate_classes))


class LinearVS(PrototypeScorer):
    """Ridge regression from visual features to class attributes.

    Parameters
    ----------
    alpha : float
        Weight of the Frobenius penalty on ``W``.
    """

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def fit(self, X, y, prototypes):
        X, y, S = self._validate_fit_input(X, y, prototypes)
        self.coef_ = fit_linear_vs(X, S[y], self.alpha)
        return self

    def _raw_scores(self, X, S):
        return score_linear_vs(self.coef_, X, S)

    def transform(self, X):
        """Predicted attributes ``W x`` for each sample."""
        check_is_fitted(self, "coef_")
        return check_array(X, dtype=np.float64) @ self.coef_.T


class LinearSV(PrototypeScorer):
    """Ridge regression from class attributes to visual features."""

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def fit(self, X, y, prototypes):
        X, y, S = self._validate_fit_input(X, y, prototypes)
        self.coef_ = fit_linear_sv(X, S[y], self.alpha)
        return self

    def _raw_scores(self, X, S):
        return score_linear_sv(self.coef_, X, S)


class BilinearRanking(PrototypeScorer):
    """Bilinear compatibility ``s^T W x`` trained with a hinge-rank loss.

    ``variant`` selects the ALE, DeViSE or SJE aggregation of rival
    violations. The rivals during training are the classes present in ``y``.
    """

    deterministic = False

    def __init__(
        self,
        variant="ale",
        alpha=0.0,
        learning_rate=0.01,
        epochs=10,
        margin_fraction=0.1,
        init_scale=0.01,
        random_state=0,
    ):
        self.variant = variant
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.margin_fraction = margin_fraction
        self.init_scale = init_scale
        self.random_state = random_state

    def fit(self, X, y, prototypes):
        X, y, S = self._validate_fit_input(X, y, prototypes)
        classes, y_rows = np.unique(y, return_inverse=True)
        sgd = SgdConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            margin_fraction=self.margin_fraction,
            init_scale=self.init_scale,
            seed=self.random_state,
        )
        self.coef_, self.margin_ = _sgd_bilinear(X, y_rows, S[classes], self.alpha, self.variant, sgd)
        self.classes_ = classes
        return self

    def _raw_scores(self, X, S):
        return score_bilinear(self.coef_, X, S)
