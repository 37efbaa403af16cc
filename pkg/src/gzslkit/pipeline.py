"""Hyperparameter selection over validation folds and final test evaluation.

ZSL selection picks the regularisation weight maximising unseen-class
accuracy among validation classes. GZSL selection scores the seen-validation
and unseen-validation pools against all training and validation classes,
finds the best calibration penalty for each weight and keeps the weight with
the best calibrated harmonic mean. In both cases the final model is refit on
every non-test sample outside the seen-test pool.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .calibration import accuracies_at, ausuc, predict, select_gamma
from .data import GzslReport, GzslSplit, RunResult, ScoreMatrix, ZslReport
from .exceptions import EmptyInput
from .metrics import AccuracyKind, accuracy, harmonic_mean
from .models import ModelSpec

log = logging.getLogger(__name__)

LAMBDA_MODES = ("zsl", "gzsl")


def default_lambda_grid():
    return tuple(float(v) for v in np.logspace(-4, 2, 10))


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec = field(default_factory=ModelSpec)
    lambda_grid: tuple = field(default_factory=default_lambda_grid)
    acc_kind: AccuracyKind = AccuracyKind.PER_CLASS
    n_runs: int = 5
    seed: int = 0
    calibrate: bool = True
    lambda_mode: str = "gzsl"

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise ValueError("lambda_grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("lambda_grid must be strictly increasing")
        if any(v < 0 for v in grid):
            raise ValueError("lambda_grid values must be >= 0")
        if self.lambda_mode not in LAMBDA_MODES:
            raise ValueError(f"lambda_mode must be one of {LAMBDA_MODES}")
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        object.__setattr__(self, "lambda_grid", grid)
        object.__setattr__(self, "acc_kind", AccuracyKind(self.acc_kind))

    @property
    def effective_runs(self) -> int:
        return self.n_runs if self.model.seeded else 1

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["acc_kind"] = self.acc_kind.value
        out["lambda_grid"] = list(self.lambda_grid)
        return out


def _fit(d, idx, cfg, lam, run_seed):
    est = cfg.model.estimator().set_params(alpha=lam)
    if cfg.model.seeded:
        est.set_params(random_state=run_seed)
    X, y = d.subset(idx)
    return est.fit(X, y, d.prototypes)


def zsl_validation_table(d, folds, cfg, run_seed=None) -> np.ndarray:
    """``A_U->Cu`` on each fold's unseen-validation pool, shape ``grid x folds``."""
    run_seed = cfg.seed if run_seed is None else run_seed
    table = np.zeros((len(cfg.lambda_grid), len(folds)))
    for i, lam in enumerate(cfg.lambda_grid):
        for j, fold in enumerate(folds):
            model = _fit(d, fold.train_idx, cfg, lam, run_seed)
            X, y = d.subset(fold.unseen_val_idx)
            pred = model.predict(X, d.prototypes, fold.partition.val_classes)
            table[i, j] = accuracy(pred, y, cfg.acc_kind)
    return table


def _gzsl_fold_scores(d, fold, model):
    idx = np.concatenate([fold.seen_val_idx, fold.unseen_val_idx])
    X, y = d.subset(idx)
    candidates = np.union1d(fold.partition.train_classes, fold.partition.val_classes)
    return model.score_matrix(X, d.prototypes, candidates, fold.partition.train_classes), y


def gzsl_validation_table(d, folds, cfg, run_seed=None):
    """Per (lambda, fold) best calibrated harmonic mean and its gamma."""
    run_seed = cfg.seed if run_seed is None else run_seed
    h = np.zeros((len(cfg.lambda_grid), len(folds)))
    g = np.zeros_like(h)
    for i, lam in enumerate(cfg.lambda_grid):
        for j, fold in enumerate(folds):
            if fold.seen_val_idx.size == 0:
                raise EmptyInput("GZSL selection needs a nonempty seen-validation pool")
            model = _fit(d, fold.train_idx, cfg, lam, run_seed)
            sm, y = _gzsl_fold_scores(d, fold, model)
            g[i, j], h[i, j] = select_gamma(sm, y, cfg.acc_kind)
    return h, g


def select_lambda_zsl(d, folds, cfg, run_seed=None) -> float:
    """Grid value with the best fold-averaged ZSL accuracy; ties to the smaller value."""
    table = zsl_validation_table(d, folds, cfg, run_seed)
    return cfg.lambda_grid[int(np.argmax(table.mean(axis=1)))]


def select_lambda_gamma_gzsl(d, folds, cfg, run_seed=None):
    """``(lambda*, gamma*)`` maximising the fold-averaged calibrated harmonic mean.

    ``gamma*`` is the mean of the per-fold optimal penalties at ``lambda*``.
    """
    h, g = gzsl_validation_table(d, folds, cfg, run_seed)
    best = int(np.argmax(h.mean(axis=1)))
    return cfg.lambda_grid[best], float(g[best].mean())


def select_gamma_at(d, folds, cfg, lam, run_seed=None) -> float:
    """Fold-averaged optimal penalty for a fixed regularisation weight."""
    single = dataclasses.replace(cfg, lambda_grid=(lam,))
    return float(gzsl_validation_table(d, folds, single, run_seed)[1].mean())


def _refit_idx(split: GzslSplit):
    return np.concatenate([split.train_idx, split.unseen_val_idx, split.seen_val_idx])


def _restrict(sm, columns, rows):
    classes = sm.candidate_classes[columns]
    return ScoreMatrix(sm.scores[rows][:, columns], classes, sm.seen_mask[columns])


def _evaluate_run(d, split, folds, cfg, run_seed) -> RunResult:
    if cfg.lambda_mode == "gzsl":
        lam, gamma = select_lambda_gamma_gzsl(d, folds, cfg, run_seed)
        if not cfg.calibrate:
            gamma = 0.0
    else:
        lam = select_lambda_zsl(d, folds, cfg, run_seed)
        gamma = select_gamma_at(d, folds, cfg, lam, run_seed) if cfg.calibrate else 0.0

    if split.seen_test_idx.size == 0 or split.unseen_test_idx.size == 0:
        raise EmptyInput("GZSL evaluation needs nonempty seen-test and unseen-test pools")
    model = _fit(d, _refit_idx(split), cfg, lam, run_seed)
    idx = np.concatenate([split.seen_test_idx, split.unseen_test_idx])
    X, y = d.subset(idx)
    sm = model.score_matrix(X, d.prototypes, split.all_classes, split.seen_classes)
    acc_u, acc_s = accuracies_at(sm, y, gamma, cfg.acc_kind)

    n_seen = split.seen_test_idx.size
    unseen_only = predict(_restrict(sm, ~sm.seen_mask, slice(n_seen, None)))
    seen_only = predict(_restrict(sm, sm.seen_mask, slice(None, n_seen)))
    log.debug("run seed %d: lambda*=%g gamma*=%g", run_seed, lam, gamma)
    return RunResult(
        acc_unseen_in_all=acc_u,
        acc_seen_in_all=acc_s,
        harmonic_mean=harmonic_mean(acc_u, acc_s),
        ausuc=ausuc(sm, y, AccuracyKind.PER_SAMPLE),
        gamma_star=gamma,
        lambda_star=lam,
        seed=run_seed,
        acc_unseen_in_unseen=accuracy(unseen_only, y[n_seen:], cfg.acc_kind),
        acc_seen_in_seen=accuracy(seen_only, y[:n_seen], cfg.acc_kind),
    )


def run_gzsl_evaluation(d, split, cfg: ExperimentConfig, folds=None) -> GzslReport:
    """Select hyperparameters on ``folds`` (default: ``[split]``) and evaluate on the test pools.

    Seeded families are repeated ``cfg.n_runs`` times with seeds
    ``cfg.seed + r``; closed-form families run once.
    """
    folds = [split] if folds is None else list(folds)
    runs = tuple(_evaluate_run(d, split, folds, cfg, cfg.seed + r) for r in range(cfg.effective_runs))
    return GzslReport(runs=runs, seed=cfg.seed, grid=cfg.lambda_grid, config=cfg.to_dict())


def run_zsl_evaluation(d, split, cfg: ExperimentConfig, folds=None) -> ZslReport:
    """Classical ZSL: unseen-test samples classified among test classes only."""
    folds = [split] if folds is None else list(folds)
    accs, lams = [], []
    for r in range(cfg.effective_runs):
        run_seed = cfg.seed + r
        lam = select_lambda_zsl(d, folds, cfg, run_seed)
        model = _fit(d, _refit_idx(split), cfg, lam, run_seed)
        X, y = d.subset(split.unseen_test_idx)
        pred = model.predict(X, d.prototypes, split.partition.test_classes)
        accs.append(accuracy(pred, y, cfg.acc_kind))
        lams.append(lam)
    return ZslReport(
        accuracies=tuple(accs), lambda_stars=tuple(lams), seed=cfg.seed,
        grid=cfg.lambda_grid, config=cfg.to_dict(),
    )
