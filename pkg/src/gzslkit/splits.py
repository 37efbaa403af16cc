"""Class-disjoint partitions and the per-sample GZSL pools.

Sample-level draws are stratified per class: each class gets its own
generator keyed on ``(seed, class)``, so the seen-test samples of a class do
not depend on which other classes share the split. Validation folds built
from one seed therefore share the same seen-test pool and never train on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import ClassPartition, Dataset, GzslSplit
from .exceptions import EmptyPool, NotEnoughClasses


@dataclass(frozen=True)
class SplitConfig:
    n_val_classes: int
    n_test_classes: int
    seen_test_fraction: float = 0.2
    seen_val_fraction: float = 0.2
    n_val_folds: int = 3
    seed: int = 0

    def __post_init__(self):
        for name in ("seen_test_fraction", "seen_val_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {v}")
        if self.n_val_classes < 1 or self.n_test_classes < 1:
            raise NotEnoughClasses("need at least one validation and one test class")
        if self.n_val_folds < 1:
            raise ValueError("n_val_folds must be >= 1")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _check_counts(d, cfg):
    if cfg.n_val_classes + cfg.n_test_classes >= d.class_count:
        raise NotEnoughClasses(
            f"{cfg.n_val_classes} validation + {cfg.n_test_classes} test classes "
            f"leave no training class out of {d.class_count}"
        )


def _test_classes(d, cfg):
    perm = np.random.default_rng(cfg.seed).permutation(d.class_count)
    return np.sort(perm[: cfg.n_test_classes])


def _partition_for_fold(d, cfg, test, fold):
    rest = np.setdiff1d(np.arange(d.class_count), test)
    rng = np.random.default_rng(cfg.seed + fold)
    val = rng.choice(rest, size=cfg.n_val_classes, replace=False)
    return ClassPartition(np.setdiff1d(rest, val), val, test)


def make_partition(d: Dataset, cfg: SplitConfig) -> ClassPartition:
    """Draw disjoint train/val/test class sets uniformly from ``cfg.seed``.

    This is fold 0 of :func:`make_validation_folds`.
    """
    _check_counts(d, cfg)
    return _partition_for_fold(d, cfg, _test_classes(d, cfg), 0)


def make_gzsl_split(d: Dataset, partition: ClassPartition, cfg: SplitConfig) -> GzslSplit:
    """Assign every sample of the partitioned classes to one of the five pools.

    Per class ``c`` of train or validation classes, ``round(f_test * n_c)``
    samples go to the seen-test pool; for training classes a further
    ``round(f_val * n'_c)`` of the remaining ``n'_c`` go to the seen-validation
    pool. Rounding is half-up.
    """
    partition.check(d.class_count)
    train_set = set(partition.train_classes.tolist())
    pools = {k: [] for k in ("train", "seen_val", "seen_test", "unseen_val")}

    for c in np.union1d(partition.train_classes, partition.val_classes):
        idx = d.class_indices(c)
        if idx.size == 0:
            continue
        perm = np.random.default_rng([cfg.seed, int(c)]).permutation(idx)
        k_test = round_half_up(cfg.seen_test_fraction * idx.size)
        pools["seen_test"].append(perm[:k_test])
        rest = perm[k_test:]
        if int(c) in train_set:
            k_val = round_half_up(cfg.seen_val_fraction * rest.size)
            pools["seen_val"].append(rest[:k_val])
            rest = rest[k_val:]
            if rest.size == 0:
                raise EmptyPool(int(c), "train")
            pools["train"].append(rest)
        else:
            if rest.size == 0:
                raise EmptyPool(int(c), "unseen validation")
            pools["unseen_val"].append(rest)

    def cat(parts):
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    return GzslSplit(
        partition=partition,
        train_idx=cat(pools["train"]),
        seen_val_idx=cat(pools["seen_val"]),
        seen_test_idx=cat(pools["seen_test"]),
        unseen_val_idx=cat(pools["unseen_val"]),
        unseen_test_idx=np.flatnonzero(np.isin(d.labels, partition.test_classes)),
    )


def make_validation_folds(d: Dataset, cfg: SplitConfig) -> list[GzslSplit]:
    """``cfg.n_val_folds`` splits sharing test classes and the seen-test pool.

    The train/validation class division of fold ``f`` is drawn from seed
    ``seed + f``.
    """
    _check_counts(d, cfg)
    test = _test_classes(d, cfg)
    return [
        make_gzsl_split(d, _partition_for_fold(d, cfg, test, f), cfg)
        for f in range(cfg.n_val_folds)
    ]
